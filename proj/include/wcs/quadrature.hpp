#ifndef WCS_QUADRATURE_HPP
#define WCS_QUADRATURE_HPP

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace wcs {

struct QuadratureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Adaptive tanh-sinh integration with an absolute error target; robust to
// the integrable endpoint derivative singularities of the step kernel.
// The schedule is fixed by (f, a, b), so repeated evaluation is bit-identical.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
  if (!(b > a)) return 0.0;
  boost::math::quadrature::tanh_sinh<double> quad(15);
  double err = 0.0, l1 = 0.0;
  double val = quad.integrate(f, a, b, 1e-12, &err, &l1);
  // tanh_sinh reports relative error against the L1 norm
  if (err * l1 > abs_tol && err > abs_tol) {
    std::ostringstream msg;
    msg << "quadrature on [" << a << ", " << b << "] did not reach abs tol "
        << abs_tol << " (achieved " << err * l1 << ")";
    throw QuadratureError(msg.str());
  }
  return val;
}

}  // namespace wcs

#endif
