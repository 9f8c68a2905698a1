#include "isofield/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace isofield::model {

namespace {

constexpr double kRelTol = 1e-9;  // atom-balance tolerance for user-entered decimals

bool close_rel(double a, double b, double scale) {
    return std::abs(a - b) <= kRelTol * std::max({std::abs(a), std::abs(b), scale, 1e-300});
}

void check_measure(const SpectralMeasure& m, const std::string& name, std::vector<Violation>& out) {
    double prev = -1.0;
    for (const auto& atom : m.atoms()) {
        if (!std::isfinite(atom.lambda) || !std::isfinite(atom.mass)) {
            out.push_back({"finite-atoms", name + ": non-finite atom", atom.lambda});
            continue;
        }
        if (atom.lambda < 0.0) out.push_back({"lambda-nonnegative", name + ": lambda < 0", atom.lambda});
        if (atom.mass <= 0.0) out.push_back({"mass-positive", name + ": mass <= 0", atom.lambda});
        if (atom.lambda <= prev)
            out.push_back({"lambda-increasing", name + ": lambdas not strictly increasing", atom.lambda});
        prev = atom.lambda;
    }
}

}  // namespace

double SpectralMeasure::total_mass() const {
    double s = 0.0;
    for (const auto& a : atoms_) s += a.mass;
    return s;
}

double SpectralMeasure::mass_at_zero() const {
    for (const auto& a : atoms_) {
        if (a.lambda == 0.0) return a.mass;
        if (a.lambda > 0.0) break;
    }
    return 0.0;
}

double SpectralMeasure::lambda_max() const {
    return atoms_.empty() ? 0.0 : atoms_.back().lambda;
}

std::string Violation::to_string() const {
    std::ostringstream os;
    os << constraint << ": " << detail;
    if (lambda) os << " (lambda = " << *lambda << ")";
    return os.str();
}

std::vector<Violation> validate(const ScalarModel& m) {
    std::vector<Violation> out;
    check_measure(m.phi, "phi", out);
    if (!std::isfinite(m.mean)) out.push_back({"finite-mean", "mean is not finite", std::nullopt});
    return out;
}

std::vector<Violation> validate(const VectorModel& m) {
    std::vector<Violation> out;
    check_measure(m.phi1, "phi1", out);
    check_measure(m.phi2, "phi2", out);
    const double a1 = m.phi1.mass_at_zero();
    const double a2 = m.phi2.mass_at_zero();
    if (!close_rel(a1, 2.0 * a2, a1 + a2))
        out.push_back({"zero-atom-balance", "phi1({0}) = 2 phi2({0}) required", 0.0});
    return out;
}

std::vector<Violation> validate(const TensorModel& m) {
    std::vector<Violation> out;
    check_measure(m.phi1, "phi1", out);
    check_measure(m.phi2, "phi2", out);
    check_measure(m.phi3, "phi3", out);
    if (!std::isfinite(m.mean)) out.push_back({"finite-mean", "mean is not finite", std::nullopt});
    if (m.v.size() != m.phi3.size()) {
        out.push_back({"v-support", "one (v1, v2) pair required per phi3 atom", std::nullopt});
    } else {
        for (std::size_t k = 0; k < m.v.size(); ++k) {
            const auto& v = m.v[k];
            const double e = 4.0 * (v.v1 - 0.5) * (v.v1 - 0.5) + 8.0 * v.v2 * v.v2;
            if (!(e <= 1.0 + 1e-12))
                out.push_back({"elliptic region", "4 (v1 - 1/2)^2 + 8 v2^2 <= 1 required",
                               m.phi3.atoms()[k].lambda});
        }
    }
    const double a1 = m.phi1.mass_at_zero();
    const double a2 = m.phi2.mass_at_zero();
    const double a3 = m.phi3.mass_at_zero();
    const double total = a1 + a2 + a3;
    if (total > 0.0) {
        if (a3 < (2.0 / 7.0) * total * (1.0 - kRelTol))
            out.push_back({"zero-atom-share", "phi3({0}) must carry at least 2/7 of the zero atoms", 0.0});
        if (!close_rel(1.5 * a1, a2, total))
            out.push_back({"zero-atom-balance", "phi1({0}) : phi2({0}) must be 1 : 3/2", 0.0});
    }
    return out;
}

std::vector<Violation> validate(const TetraTensorModel& m) {
    std::vector<Violation> out;
    check_measure(m.phi1, "phi1", out);
    check_measure(m.phi2, "phi2", out);
    check_measure(m.phi3, "phi3", out);
    check_measure(m.phi4, "phi4", out);
    if (!std::isfinite(m.mean)) out.push_back({"finite-mean", "mean is not finite", std::nullopt});
    const double a1 = m.phi1.mass_at_zero();
    const double a2 = m.phi2.mass_at_zero();
    const double a3 = m.phi3.mass_at_zero();
    const double a4 = m.phi4.mass_at_zero();
    const double total = a1 + a2 + a3 + a4;
    if (total > 0.0) {
        // One free parameter a = phi1({0})/total in [0, 2/7] fixes all four shares.
        const double a = a1 / total;
        if (a > 2.0 / 7.0 + kRelTol)
            out.push_back({"zero-atom-share", "phi1({0}) share exceeds 2/7 of the zero atoms", 0.0});
        if (!close_rel(a2, 1.5 * a * total, total))
            out.push_back({"zero-atom-balance", "phi2({0}) must equal 3/2 phi1({0})", 0.0});
        if (!close_rel(a3, total * (1.0 / 3.0 - 0.5 * a), total))
            out.push_back({"zero-atom-balance", "phi3({0}) inconsistent with the zero-atom split", 0.0});
        if (!close_rel(a4, total * (2.0 / 3.0 - 2.0 * a), total))
            out.push_back({"zero-atom-balance", "phi4({0}) inconsistent with the zero-atom split", 0.0});
    }
    return out;
}

std::vector<Violation> validate(const AnyModel& m) {
    return std::visit([](const auto& x) { return validate(x); }, m);
}

bool VectorSimplex::valid(double tol) const {
    return u1 >= -tol && u2 >= -tol && std::abs(u1 + u2 - 1.0) <= tol;
}

bool TensorSimplex::valid(double tol) const {
    if (u1 < -tol || u2 < -tol || u3 < -tol || u4 < -tol) return false;
    if (std::abs(u1 + u2 + u3 + u4 - 1.0) > tol) return false;
    return u5 * u5 <= std::max(u3, 0.0) * std::max(u4, 0.0) / 2.0 + tol;
}

Mat3 f_matrix_vector(double u1, double u2) {
    if (!VectorSimplex{u1, u2}.valid())
        throw std::domain_error("f_matrix_vector: coordinates outside the simplex");
    Mat3 f;
    f(-1, -1) = 0.5 * u1;
    f(1, 1) = 0.5 * u1;
    f(0, 0) = u2;
    return f;
}

Mat6 f_matrix_tensor(const TensorSimplex& u) {
    if (!u.valid()) throw std::domain_error("f_matrix_tensor: coordinates outside the convex set");
    Mat6 f;
    // f = u1 D1 + u2 D2 + (u3 + u4) D(v) with v1 = u3/(u3+u4), v2 = u5/(u3+u4).
    f(0, 0) = f(2, 2) = u.u2 / 3.0 + u.u3 / 2.0;
    f(0, 2) = f(2, 0) = -u.u2 / 3.0 + u.u3 / 2.0;
    f(1, 1) = u.u4;
    f(0, 1) = f(1, 0) = u.u5;
    f(1, 2) = f(2, 1) = u.u5;
    f(3, 3) = f(5, 5) = u.u1 / 2.0;
    f(4, 4) = u.u2 / 3.0;
    return f;
}

Mat6 d_matrix_from_v(const EllipseCoords& v) {
    Mat6 d;
    d(0, 0) = d(2, 2) = 0.5 * v.v1;
    d(0, 2) = d(2, 0) = 0.5 * v.v1;
    d(1, 1) = 1.0 - v.v1;
    d(0, 1) = d(1, 0) = v.v2;
    d(1, 2) = d(2, 1) = v.v2;
    return d;
}

VoigtPair voigt_pair(int a) {
    static constexpr VoigtPair pairs[6] = {{-1, -1}, {0, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}};
    if (a < 0 || a > 5) throw std::domain_error("voigt_pair: slot out of range");
    return pairs[a];
}

// ---------------------------------------------------------------------------
// JSON I/O
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

SpectralMeasure measure_from_json(const json& j) {
    std::vector<SpectralAtom> atoms;
    for (const auto& a : j.at("atoms"))
        atoms.push_back({a.at("lambda").get<double>(), a.at("mass").get<double>()});
    return SpectralMeasure(std::move(atoms));
}

json measure_to_json(const std::string& name, const SpectralMeasure& m) {
    json atoms = json::array();
    for (const auto& a : m.atoms()) atoms.push_back({{"lambda", a.lambda}, {"mass", a.mass}});
    return json{{"name", name}, {"atoms", atoms}};
}

SpectralMeasure find_measure(const json& j, const std::string& name) {
    for (const auto& m : j.at("measures"))
        if (m.at("name").get<std::string>() == name) return measure_from_json(m);
    throw std::runtime_error("model file: missing measure '" + name + "'");
}

std::vector<EllipseCoords> match_v_to_phi3(const json& j, const SpectralMeasure& phi3) {
    std::vector<EllipseCoords> out;
    if (!j.contains("v")) return out;
    const auto& varr = j.at("v");
    for (const auto& atom : phi3.atoms()) {
        bool found = false;
        for (const auto& entry : varr) {
            const double lam = entry.at("lambda").get<double>();
            if (std::abs(lam - atom.lambda) <= 1e-12 * std::max(1.0, std::abs(atom.lambda))) {
                out.push_back({entry.at("v1").get<double>(), entry.at("v2").get<double>()});
                found = true;
                break;
            }
        }
        if (!found) return {};  // size mismatch reported by validate()
    }
    return out;
}

}  // namespace

ModelValidationError::ModelValidationError(std::vector<Violation> v)
    : std::runtime_error("model failed validation"), violations(std::move(v)) {}

AnyModel parse_model(const std::string& json_text) {
    const json j = json::parse(json_text);
    const std::string kind = j.at("kind").get<std::string>();
    const double mean = j.contains("mean") ? j.at("mean").get<double>() : 0.0;

    AnyModel result;
    if (kind == "scalar") {
        result = ScalarModel{find_measure(j, "phi"), mean};
    } else if (kind == "vector") {
        result = VectorModel{find_measure(j, "phi1"), find_measure(j, "phi2")};
    } else if (kind == "tensor") {
        TensorModel m;
        m.phi1 = find_measure(j, "phi1");
        m.phi2 = find_measure(j, "phi2");
        m.phi3 = find_measure(j, "phi3");
        m.v = match_v_to_phi3(j, m.phi3);
        m.mean = mean;
        result = m;
    } else if (kind == "tensor_u5zero") {
        TetraTensorModel m;
        m.phi1 = find_measure(j, "phi1");
        m.phi2 = find_measure(j, "phi2");
        m.phi3 = find_measure(j, "phi3");
        m.phi4 = find_measure(j, "phi4");
        m.mean = mean;
        result = m;
    } else {
        throw std::runtime_error("model file: unknown kind '" + kind + "'");
    }

    auto violations = validate(result);
    if (!violations.empty()) throw ModelValidationError(std::move(violations));
    return result;
}

AnyModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str());
}

std::string model_to_json(const AnyModel& m) {
    json j;
    if (const auto* s = std::get_if<ScalarModel>(&m)) {
        j["kind"] = "scalar";
        j["mean"] = s->mean;
        j["measures"] = json::array({measure_to_json("phi", s->phi)});
    } else if (const auto* v = std::get_if<VectorModel>(&m)) {
        j["kind"] = "vector";
        j["mean"] = 0.0;
        j["measures"] = json::array({measure_to_json("phi1", v->phi1), measure_to_json("phi2", v->phi2)});
    } else if (const auto* t = std::get_if<TensorModel>(&m)) {
        j["kind"] = "tensor";
        j["mean"] = t->mean;
        j["measures"] = json::array({measure_to_json("phi1", t->phi1), measure_to_json("phi2", t->phi2),
                                     measure_to_json("phi3", t->phi3)});
        json varr = json::array();
        for (std::size_t k = 0; k < t->v.size(); ++k)
            varr.push_back({{"lambda", t->phi3.atoms()[k].lambda},
                            {"v1", t->v[k].v1},
                            {"v2", t->v[k].v2}});
        j["v"] = varr;
    } else if (const auto* q = std::get_if<TetraTensorModel>(&m)) {
        j["kind"] = "tensor_u5zero";
        j["mean"] = q->mean;
        j["measures"] =
            json::array({measure_to_json("phi1", q->phi1), measure_to_json("phi2", q->phi2),
                         measure_to_json("phi3", q->phi3), measure_to_json("phi4", q->phi4)});
    }
    return j.dump(2);
}

void save_model(const AnyModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << model_to_json(m) << '\n';
}

const char* kind_name(const AnyModel& m) {
    if (std::holds_alternative<ScalarModel>(m)) return "scalar";
    if (std::holds_alternative<VectorModel>(m)) return "vector";
    if (std::holds_alternative<TensorModel>(m)) return "tensor";
    return "tensor_u5zero";
}

}  // namespace isofield::model
