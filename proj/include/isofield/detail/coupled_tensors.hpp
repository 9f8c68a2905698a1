#pragma once

#include <array>

#include "isofield/correlation.hpp"

namespace isofield::detail {

/// Fixed low-degree coupled tensors shared by the M basis and the
/// mode-covariance entries.  Built once from the coupling coefficients.
struct CoupledTensors {
    correlation::Rank4Tensor t010;                // delta x delta / 3
    correlation::Rank4Tensor t020;                // traceless projector / sqrt(5)
    std::array<correlation::Rank4Tensor, 5> t21;  // t = -2..2
    std::array<correlation::Rank4Tensor, 5> t22;  // t = -2..2
    std::array<correlation::Rank4Tensor, 9> t41;  // t = -4..4
    double g2[5][3][3];                           // g^{t[i,j]}_{2[1,1]}
    correlation::Rank4Tensor g2pair;              // sum_n g2(n,ij) g2(n,lm)

    CoupledTensors();

  private:
    void fill_quartic(correlation::Rank4Tensor& out, int big_ell, int t);
};

const CoupledTensors& coupled_tensors();

}  // namespace isofield::detail
