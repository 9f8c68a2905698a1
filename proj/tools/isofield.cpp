// Command-line front end: closed-form evaluation, coefficient tables,
// Gaussian synthesis and verification for isotropic random-field models.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "isofield/bmodes.hpp"
#include "isofield/correlation.hpp"
#include "isofield/coupling.hpp"
#include "isofield/model.hpp"
#include "isofield/simulate.hpp"
#include "isofield/specfun.hpp"
#include "isofield/verify.hpp"

namespace {

using namespace isofield;

constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;
constexpr int kExitOracle = 4;

// All file output goes through a temp file plus rename so partial writes
// never land under the target name.
void write_atomically(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + tmp.string());
        out << content;
    }
    fs::rename(tmp, target);
}

std::string header_comment(bool deterministic) {
    if (deterministic) return "";
    const std::time_t now = std::time(nullptr);
    char buf[64];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return std::string("# generated ") + buf + "\n";
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

model::AnyModel load_or_exit(const std::string& path) {
    try {
        return model::load_model(path);
    } catch (const model::ModelValidationError& e) {
        std::cerr << "model validation failed:\n";
        for (const auto& v : e.violations) std::cerr << "  " << v.to_string() << "\n";
        std::exit(kExitValidation);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(kExitValidation);
    }
}

int resolve_threads(int cli_threads) {
    if (cli_threads > 0) return cli_threads;
    if (const char* env = std::getenv("ISOFIELD_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

// ---------------------------------------------------------------------------
// tables
// ---------------------------------------------------------------------------

int run_tables_coupling(int lmax, const std::string& out, bool deterministic) {
    std::ostringstream os;
    os << header_comment(deterministic);
    os << "ell,m,ell1,m1,ell2,m2,value\n";
    coupling::CouplingTable::instance().prefill(lmax);
    for (int l1 = 0; l1 <= lmax; ++l1)
        for (int l2 = 0; l2 <= lmax; ++l2)
            for (int l = std::abs(l1 - l2); l <= std::min(lmax, l1 + l2); ++l)
                for (int m = -l; m <= l; ++m)
                    for (int m1 = -l1; m1 <= l1; ++m1)
                        for (int m2 = -l2; m2 <= l2; ++m2) {
                            const double v = coupling::gg(coupling::CouplingKey(l, m, l1, m1, l2, m2));
                            if (std::abs(v) < 1e-14) continue;
                            os << l << ',' << m << ',' << l1 << ',' << m1 << ',' << l2 << ',' << m2 << ','
                               << format_double(v) << "\n";
                        }
    write_atomically(out, os.str());
    return 0;
}

int run_tables_bmatrix(const std::string& kind_name, int lmax, double v1, double v2,
                       const std::string& out, bool deterministic) {
    const bmodes::BKind kind = bmodes::bkind_from_string(kind_name);
    const bmodes::ModeCovariance cov = bmodes::assemble(kind, lmax, {v1, v2});
    const DenseMatrix factor = bmodes::semidefinite_cholesky(cov);
    std::ostringstream os;
    os << header_comment(deterministic);
    os << "# kind=" << kind_name << " lmax=" << lmax;
    if (kind == bmodes::BKind::tensor3) os << " v1=" << v1 << " v2=" << v2;
    os << "\n";
    os << "section,row,col,value\n";
    const std::size_t n = cov.entries.rows();
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            if (cov.entries(r, c) != 0.0)
                os << "b," << r << ',' << c << ',' << format_double(cov.entries(r, c)) << "\n";
        }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c <= r; ++c) {
            if (factor(r, c) != 0.0)
                os << "cholesky," << r << ',' << c << ',' << format_double(factor(r, c)) << "\n";
        }
    write_atomically(out, os.str());
    return 0;
}

int run_tables_nfunctions(double lambda_rho, double v1, double v2, const std::string& out,
                          bool deterministic) {
    std::vector<double> j;
    specfun::spherical_bessel_array(4, lambda_rho, j);
    const std::array<double, 3> jv{j[0], j[2], j[4]};
    const auto& table = correlation::NFunctionTable::standard();
    std::ostringstream os;
    os << header_comment(deterministic);
    os << "# lambda_rho=" << lambda_rho << " v1=" << v1 << " v2=" << v2 << "\n";
    os << "n,q,value\n";
    for (int n = 1; n <= 3; ++n)
        for (int q = 1; q <= 5; ++q)
            os << n << ',' << q << ',' << format_double(table.value(n, q, jv, {v1, v2})) << "\n";
    write_atomically(out, os.str());
    return 0;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

std::string eval_point(const model::AnyModel& m, const correlation::Separation& xi,
                       const std::string& format) {
    std::ostringstream os;
    os.precision(17);
    if (const auto* s = std::get_if<model::ScalarModel>(&m)) {
        const double v = correlation::scalar_correlation(*s, xi.rho);
        if (format == "json")
            os << "{\"kind\":\"scalar\",\"value\":" << v << "}\n";
        else
            os << "value\n" << format_double(v) << "\n";
    } else if (const auto* vm = std::get_if<model::VectorModel>(&m)) {
        const Mat3 r = correlation::vector_correlation(*vm, xi);
        if (format == "json") {
            os << "{\"kind\":\"vector\",\"matrix\":[";
            for (int i = -1; i <= 1; ++i) {
                os << (i > -1 ? "," : "") << "[";
                for (int j = -1; j <= 1; ++j) os << (j > -1 ? "," : "") << r(i, j);
                os << "]";
            }
            os << "]}\n";
        } else {
            os << "i,j,value\n";
            for (int i = -1; i <= 1; ++i)
                for (int j = -1; j <= 1; ++j)
                    os << i << ',' << j << ',' << format_double(r(i, j)) << "\n";
        }
    } else {
        const correlation::Rank4Tensor r =
            std::holds_alternative<model::TensorModel>(m)
                ? correlation::tensor_correlation(std::get<model::TensorModel>(m), xi)
                : correlation::tensor_correlation_u5zero(std::get<model::TetraTensorModel>(m), xi);
        const Mat6 v = r.voigt();
        if (format == "json") {
            os << "{\"kind\":\"tensor\",\"voigt\":[";
            for (int a = 0; a < 6; ++a) {
                os << (a > 0 ? "," : "") << "[";
                for (int b = 0; b < 6; ++b) os << (b > 0 ? "," : "") << v(a, b);
                os << "]";
            }
            os << "]}\n";
        } else {
            os << "row,col,value\n";
            for (int a = 0; a < 6; ++a)
                for (int b = 0; b < 6; ++b) os << a << ',' << b << ',' << format_double(v(a, b)) << "\n";
        }
    }
    return os.str();
}

std::string eval_curve(const model::AnyModel& m, double rho_max, int steps, bool deterministic) {
    std::ostringstream os;
    os << header_comment(deterministic);
    if (std::holds_alternative<model::ScalarModel>(m)) {
        os << "rho,value\n";
        for (int k = 1; k <= steps; ++k) {
            const double rho = rho_max * k / steps;
            os << format_double(rho) << ','
               << format_double(correlation::scalar_correlation(std::get<model::ScalarModel>(m), rho))
               << "\n";
        }
    } else if (std::holds_alternative<model::VectorModel>(m)) {
        os << "rho,A,B\n";
        for (int k = 1; k <= steps; ++k) {
            const double rho = rho_max * k / steps;
            const auto [a, b] = correlation::robertson_AB(std::get<model::VectorModel>(m), rho);
            os << format_double(rho) << ',' << format_double(a) << ',' << format_double(b) << "\n";
        }
    } else if (std::holds_alternative<model::TensorModel>(m)) {
        os << "rho,a1,a2,a3,a4,a5\n";
        for (int k = 1; k <= steps; ++k) {
            const double rho = rho_max * k / steps;
            const auto a = correlation::lomakin_coefficients(std::get<model::TensorModel>(m), rho);
            os << format_double(rho);
            for (double v : a) os << ',' << format_double(v);
            os << "\n";
        }
    } else {
        throw std::runtime_error("eval --curve: unsupported for four-measure models");
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// simulate / verify
// ---------------------------------------------------------------------------

int run_simulate(const model::AnyModel& m, const std::string& grid_path, std::uint64_t seed,
                 int lmax, std::size_t n_real, const std::string& out, int threads,
                 bool deterministic) {
    const simulate::GridSpec grid = simulate::GridSpec::load_csv(grid_path);
    simulate::Sampler sampler(m, grid, lmax);
    const simulate::Ensemble e = sampler.ensemble(seed, n_real, threads);
    std::ostringstream os;
    os << header_comment(deterministic);
    os << "# model kind=" << model::kind_name(m) << " seed=" << seed << " lmax=" << lmax
       << " truncation_tail_bound=" << format_double(sampler.truncation_tail_bound()) << "\n";
    os << "realization,r,theta,phi";
    if (e.components == 1) os << ",value";
    if (e.components == 3) os << ",u_m1,u_0,u_p1";
    if (e.components == 6) os << ",t_11,t_22,t_33,t_23,t_13,t_12";
    os << "\n";
    for (std::size_t r = 0; r < n_real; ++r) {
        for (std::size_t p = 0; p < grid.points.size(); ++p) {
            os << r << ',' << format_double(grid.points[p].r) << ','
               << format_double(grid.points[p].theta) << ',' << format_double(grid.points[p].phi);
            for (int c = 0; c < e.components; ++c) os << ',' << format_double(e.at(r, p, c));
            os << "\n";
        }
    }
    write_atomically(out, os.str());
    return 0;
}

int run_verify(const model::AnyModel& m, int mc, bool oracle, bool isotropy, std::uint64_t seed,
               const std::string& out) {
    std::ostringstream os;
    bool all_pass = true;
    std::vector<std::string> reports;

    const auto push = [&](const verify::OracleReport& rep) {
        reports.push_back(rep.to_json());
        all_pass = all_pass && rep.pass;
    };

    if (oracle) {
        if (const auto* vm = std::get_if<model::VectorModel>(&m)) push(verify::oracle_report(*vm, 20, seed));
        else if (const auto* tm = std::get_if<model::TensorModel>(&m))
            push(verify::oracle_report(*tm, 20, seed));
        else {
            verify::OracleReport rep;
            rep.name = "oracle";
            rep.detail = "oracle comparison applies to vector and tensor models";
            rep.pass = true;
            push(rep);
        }
    }
    if (isotropy) {
        if (const auto* vm = std::get_if<model::VectorModel>(&m)) {
            push(verify::isotropy_report(
                [vm](const correlation::Separation& xi) { return correlation::vector_correlation(*vm, xi); },
                50, 3, seed + 1));
        } else if (const auto* tm = std::get_if<model::TensorModel>(&m)) {
            push(verify::isotropy_report(
                [tm](const correlation::Separation& xi) { return correlation::tensor_correlation(*tm, xi); },
                50, 3, seed + 1));
        }
    }
    if (mc > 0) {
        // Covariance of the synthesized ensemble against the closed form at a
        // few separations along one ray.
        simulate::GridSpec grid;
        grid.points = {{0.0, 1.1, 0.7}, {0.35, 1.1, 0.7}, {0.7, 1.1, 0.7}, {1.05, 1.1, 0.7}};
        const simulate::Ensemble e =
            simulate::simulate_ensemble(m, grid, seed + 2, 12, static_cast<std::size_t>(mc), resolve_threads(0));
        verify::OracleReport rep;
        rep.name = "monte carlo covariance";
        rep.tolerance = 3.0;
        double worst_sigma = 0.0;
        for (std::size_t pa = 0; pa < grid.points.size(); ++pa)
            for (std::size_t pb = pa; pb < grid.points.size(); ++pb) {
                Vec3 d;
                const Vec3 da = specfun::direction_components(
                    specfun::AngularPair(grid.points[pa].theta, grid.points[pa].phi));
                const Vec3 db = specfun::direction_components(
                    specfun::AngularPair(grid.points[pb].theta, grid.points[pb].phi));
                for (int k = -1; k <= 1; ++k) d(k) = grid.points[pa].r * da(k) - grid.points[pb].r * db(k);
                const correlation::Separation xi(d);
                for (int c = 0; c < e.components; ++c) {
                    std::vector<double> xs(e.n_realizations), ys(e.n_realizations);
                    for (std::size_t r = 0; r < e.n_realizations; ++r) {
                        xs[r] = e.at(r, pa, c);
                        ys[r] = e.at(r, pb, c);
                    }
                    const auto cov = verify::mc_covariance(xs, ys);
                    double expect = 0.0;
                    if (const auto* s = std::get_if<model::ScalarModel>(&m))
                        expect = correlation::scalar_correlation(*s, xi.rho);
                    else if (const auto* vm = std::get_if<model::VectorModel>(&m))
                        expect = correlation::vector_correlation(*vm, xi)(c - 1, c - 1);
                    else {
                        const auto pair = model::voigt_pair(c);
                        const correlation::Rank4Tensor r4 =
                            std::holds_alternative<model::TensorModel>(m)
                                ? correlation::tensor_correlation(std::get<model::TensorModel>(m), xi)
                                : correlation::tensor_correlation_u5zero(
                                      std::get<model::TetraTensorModel>(m), xi);
                        expect = r4.at(pair.i, pair.j, pair.i, pair.j);
                    }
                    if (cov.stderr_jackknife > 0.0)
                        worst_sigma = std::max(worst_sigma, std::abs(cov.estimate - expect) / cov.stderr_jackknife);
                }
            }
        rep.max_abs_error = worst_sigma;
        rep.pass = worst_sigma <= 3.0;
        rep.detail = "max |z| over point pairs and components";
        push(rep);
    }

    os << "{\"model\":\"" << model::kind_name(m) << "\",\"pass\":" << (all_pass ? "true" : "false")
       << ",\"reports\":[";
    for (std::size_t k = 0; k < reports.size(); ++k) os << (k ? "," : "") << reports[k];
    os << "]}\n";
    write_atomically(out, os.str());
    return all_pass ? 0 : kExitOracle;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"isotropic random-field models: evaluation, synthesis, verification"};
    app.require_subcommand(1);
    app.fallthrough();
    bool deterministic = false;
    app.add_flag("--deterministic", deterministic, "suppress timestamp headers in outputs");

    // tables
    auto* tables = app.add_subcommand("tables", "emit coefficient tables as CSV");
    tables->require_subcommand(1);
    int t_lmax = 2;
    std::string t_out = "-";
    auto* t_coupling = tables->add_subcommand("coupling", "coupling coefficients");
    t_coupling->add_option("--lmax", t_lmax, "max degree")->required();
    t_coupling->add_option("--out", t_out, "output path (default stdout)");

    std::string b_kind = "vector1";
    int b_lmax = 4;
    double b_v1 = 0.5, b_v2 = 0.0;
    std::string b_out = "-";
    auto* t_bmatrix = tables->add_subcommand("bmatrix", "mode covariance and its factor");
    t_bmatrix->add_option("--kind", b_kind, "vector1|vector2|tensor1|tensor2|tensor3")->required();
    t_bmatrix->add_option("--lmax", b_lmax, "truncation degree")->required();
    t_bmatrix->add_option("--v1", b_v1, "ellipse coordinate (tensor3)");
    t_bmatrix->add_option("--v2", b_v2, "ellipse coordinate (tensor3)");
    t_bmatrix->add_option("--out", b_out, "output path");

    double n_lr = 1.0, n_v1 = 0.5, n_v2 = 0.0;
    std::string n_out = "-";
    auto* t_nfun = tables->add_subcommand("nfunctions", "radial coefficient functions");
    t_nfun->add_option("--lambda-rho", n_lr, "kernel argument")->required();
    t_nfun->add_option("--v1", n_v1, "ellipse coordinate");
    t_nfun->add_option("--v2", n_v2, "ellipse coordinate");
    t_nfun->add_option("--out", n_out, "output path");

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate closed-form correlations");
    std::string e_model, e_xi, e_format = "csv", e_out = "-";
    bool e_curve = false;
    double e_rho_max = 2.0;
    int e_steps = 50;
    eval->add_option("--model", e_model, "model JSON file")->required();
    eval->add_option("--xi", e_xi, "separation as x,y,z");
    eval->add_flag("--curve", e_curve, "emit invariant-coefficient curves");
    eval->add_option("--rho-max", e_rho_max, "curve range");
    eval->add_option("--steps", e_steps, "curve steps");
    eval->add_option("--format", e_format, "csv|json");
    eval->add_option("--out", e_out, "output path");

    // simulate
    auto* sim = app.add_subcommand("simulate", "synthesize Gaussian realizations");
    std::string s_model, s_grid, s_out;
    std::uint64_t s_seed = 1;
    int s_lmax = 12, s_threads = 0;
    std::size_t s_n = 1;
    sim->add_option("--model", s_model, "model JSON file")->required();
    sim->add_option("--grid", s_grid, "grid CSV file (r,theta,phi)")->required();
    sim->add_option("--seed", s_seed, "RNG seed");
    sim->add_option("--lmax", s_lmax, "truncation degree");
    sim->add_option("--n-realizations", s_n, "number of realizations");
    sim->add_option("--out", s_out, "output CSV path")->required();
    sim->add_option("--threads", s_threads, "worker threads (or ISOFIELD_THREADS)");

    // verify
    auto* ver = app.add_subcommand("verify", "independent checks against the closed forms");
    std::string v_model, v_out = "-";
    int v_mc = 0;
    bool v_oracle = false, v_isotropy = false;
    std::uint64_t v_seed = 7;
    ver->add_option("--model", v_model, "model JSON file")->required();
    ver->add_option("--mc", v_mc, "Monte-Carlo realizations");
    ver->add_flag("--oracle", v_oracle, "quadrature-route comparison");
    ver->add_flag("--isotropy", v_isotropy, "rotation-equivariance check");
    ver->add_option("--seed", v_seed, "RNG seed");
    ver->add_option("--out", v_out, "output path");

    // model round trip
    auto* mod = app.add_subcommand("model", "validate and rewrite a model file");
    std::string m_in, m_out = "-";
    mod->add_option("--model", m_in, "model JSON file")->required();
    mod->add_option("--out", m_out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (t_coupling->parsed()) return run_tables_coupling(t_lmax, t_out, deterministic);
        if (t_bmatrix->parsed()) return run_tables_bmatrix(b_kind, b_lmax, b_v1, b_v2, b_out, deterministic);
        if (t_nfun->parsed()) return run_tables_nfunctions(n_lr, n_v1, n_v2, n_out, deterministic);
        if (eval->parsed()) {
            const model::AnyModel m = load_or_exit(e_model);
            if (e_curve) {
                write_atomically(e_out, eval_curve(m, e_rho_max, e_steps, deterministic));
            } else {
                if (e_xi.empty()) {
                    std::cerr << "eval: need --xi or --curve\n";
                    return kExitUsage;
                }
                double x = 0, y = 0, z = 0;
                if (std::sscanf(e_xi.c_str(), "%lf,%lf,%lf", &x, &y, &z) != 3) {
                    std::cerr << "eval: cannot parse --xi '" << e_xi << "'\n";
                    return kExitUsage;
                }
                write_atomically(e_out, eval_point(m, correlation::Separation::cartesian(x, y, z), e_format));
            }
            return 0;
        }
        if (sim->parsed()) {
            const model::AnyModel m = load_or_exit(s_model);
            return run_simulate(m, s_grid, s_seed, s_lmax, s_n, s_out, resolve_threads(s_threads),
                                deterministic);
        }
        if (ver->parsed()) {
            const model::AnyModel m = load_or_exit(v_model);
            return run_verify(m, v_mc, v_oracle, v_isotropy, v_seed, v_out);
        }
        if (mod->parsed()) {
            const model::AnyModel m = load_or_exit(m_in);
            write_atomically(m_out, model::model_to_json(m) + "\n");
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
