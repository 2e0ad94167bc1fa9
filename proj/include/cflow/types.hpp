#ifndef CFLOW_TYPES_HPP
#define CFLOW_TYPES_HPP

#include <complex>
#include <vector>

namespace cflow {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

// One sample of a flow: parameter tau, inverse propagator G^{-1}, coupling gamma.
// `aux` carries an optional per-sample diagnostic (an invariant, or chi_R for GP flows).
struct FlowState {
    cplx tau;
    cplx g_inv;
    cplx gamma;
    cplx aux{0.0, 0.0};
};

struct Trajectory {
    std::vector<FlowState> states;
    std::vector<double> s;  // real contour parameter, tau = s * exp(i * contour_angle)
    double contour_angle = 0.0;
    double step = 0.0;
};

}  // namespace cflow

#endif
