#include "bulge/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/QR>

#include "bulge/errors.hpp"
#include "bulge/version.hpp"

namespace bulge {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// Centre-deflection coefficient of the pretension-only problem
//   sigma0 * t * laplace(w) = -P  on [-a,a]x[-b,b], w = 0 on the boundary,
// as phi in w_centre = phi * P a^2 / (sigma0 t). Classical separated series;
// phi -> 1/2 in the long-strip limit and 1/C1 in general.
double phi_center(double aspect_ratio) {
  const double pi = M_PI;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 61; k += 2) {
    const double arg = 0.5 * k * pi * aspect_ratio;
    if (arg > 700.0) break;  // sech underflows
    const double term = sign / (std::cosh(arg) * double(k) * double(k) * double(k));
    sum += term;
    sign = -sign;
    if (std::abs(term) < 1e-18) break;
  }
  return 0.5 - (16.0 / (pi * pi * pi)) * sum;
}

// Smooth first guesses used only for pressure-ladder scaling and for the
// preconditioner; accuracy beyond ~10% is irrelevant here.
double c1_estimate(double aspect_ratio) { return 1.0 / phi_center(aspect_ratio); }

double f_estimate(double aspect_ratio, double nu) {
  const double f_square = f_square_vlassak_nix(nu);
  const double f_strip = f_strip_vlassak_nix(nu);
  return f_strip + (f_square - f_strip) * std::exp(-1.5 * (aspect_ratio - 1.0));
}

void estimate_linear_cubic(const MembraneGeometry& g, const MaterialParams& m,
                           double* A, double* B) {
  const double a = g.half_width_a;
  const double t = g.thickness_t;
  const double r = g.aspect_ratio();
  *A = c1_estimate(r) * t * m.residual_stress_sigma0 / (a * a);
  *B = f_estimate(r, m.poisson_nu) * (t / (a * a * a * a)) *
       (m.youngs_modulus_E / (1.0 - m.poisson_nu));
}

double estimate_deflection(double A, double B, double pressure) {
  // Solves A h + B h^3 = P for the positive root (A, B > 0 here).
  double h = std::cbrt(pressure / B);
  h = std::min(h, pressure / A);
  for (int i = 0; i < 60; ++i) {
    const double fval = A * h + B * h * h * h - pressure;
    const double fp = A + 3.0 * B * h * h;
    const double step = fval / fp;
    h -= step;
    if (std::abs(step) <= 1e-14 * h) break;
  }
  return h;
}

using Eigen::ArrayXXd;
using Eigen::Map;
using Eigen::VectorXd;

// Bilinear form of the in-plane elasticity on strain triples (exx, eyy, gxy):
// the polarization of the quadratic energy density.
template <class EX, class EY, class G, class FX, class FY, class H>
auto bilinear_form(double nu, const EX& ex, const EY& ey, const G& g,
                   const FX& fx, const FY& fy, const H& h) {
  return ex * fx + ey * fy + nu * (ex * fy + ey * fx) + 0.5 * (1.0 - nu) * g * h;
}

// Discrete total-potential functional of the nondimensional membrane problem
// on one grid (full window or one quarter of it). Fields are sampled at the
// nodes; strains are built from edge differences and evaluated at the four
// corners of every cell with weight dx*dy/4, which is the bilinear-element
// integral with nodal quadrature. In the small-slope limit this reduces the
// w equation to the standard 5-point Laplacian, and it leaves no
// checkerboard-type nullspace.
class MembraneProblem {
 public:
  MembraneProblem(int nx, int ny, double dx, double dy, bool quarter,
                  double s, double nu, double p_hat)
      : nx_(nx), ny_(ny), dx_(dx), dy_(dy), s_(s), nu_(nu) {
    mask_u_ = ArrayXXd::Ones(nx, ny);
    mask_v_ = ArrayXXd::Ones(nx, ny);
    mask_w_ = ArrayXXd::Ones(nx, ny);
    // Outer edges are clamped. On a quarter grid, i = 0 is the x = 0
    // symmetry line (u odd, so u = 0; v, w free) and j = 0 the y = 0 line
    // (v = 0; u, w free); the remaining two edges are the window boundary.
    if (quarter) {
      mask_u_.col(ny - 1).setZero();
      mask_u_.row(nx - 1).setZero();
      mask_u_.row(0).setZero();
      mask_v_.col(ny - 1).setZero();
      mask_v_.row(nx - 1).setZero();
      mask_v_.col(0).setZero();
      mask_w_.col(ny - 1).setZero();
      mask_w_.row(nx - 1).setZero();
    } else {
      for (ArrayXXd* m : {&mask_u_, &mask_v_, &mask_w_}) {
        m->row(0).setZero();
        m->row(nx - 1).setZero();
        m->col(0).setZero();
        m->col(ny - 1).setZero();
      }
    }

    // Trapezoid weights of the load integral over this grid's own domain.
    ArrayXXd trap = ArrayXXd::Ones(nx, ny);
    trap.row(0) *= 0.5;
    trap.row(nx - 1) *= 0.5;
    trap.col(0) *= 0.5;
    trap.col(ny - 1) *= 0.5;
    load_w_ = p_hat * dx * dy * trap;
    load_norm_ = std::sqrt(((load_w_ * mask_w_).square()).sum());

    n_free_ = static_cast<int>(std::lround(mask_u_.sum() + mask_v_.sum() + mask_w_.sum()));

    const int mx = nx - 1;
    const int my = ny - 1;
    dxu_.resize(mx, ny); dxv_.resize(mx, ny); dxw_.resize(mx, ny);
    dyu_.resize(nx, my); dyv_.resize(nx, my); dyw_.resize(nx, my);
    tdxu_.resize(mx, ny); tdxv_.resize(mx, ny); tdxw_.resize(mx, ny);
    tdyu_.resize(nx, my); tdyv_.resize(nx, my); tdyw_.resize(nx, my);
    gdxu_.resize(mx, ny); gdxv_.resize(mx, ny); gdxw_.resize(mx, ny);
    gdyu_.resize(nx, my); gdyv_.resize(nx, my); gdyw_.resize(nx, my);
    ex_.resize(mx, my); ey_.resize(mx, my); gam_.resize(mx, my);
    nxx_.resize(mx, my); nyy_.resize(mx, my); nxy_.resize(mx, my);
    lx_.resize(mx, my); ly_.resize(mx, my); lg_.resize(mx, my);
    mux_.resize(mx, my); muy_.resize(mx, my); mug_.resize(mx, my);
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int dof() const { return 3 * nx_ * ny_; }
  int free_dof() const { return n_free_; }
  double load_norm() const { return load_norm_; }

  void zero_fixed(VectorXd& z) const {
    const int n = nx_ * ny_;
    Map<ArrayXXd>(z.data(), nx_, ny_) *= mask_u_;
    Map<ArrayXXd>(z.data() + n, nx_, ny_) *= mask_v_;
    Map<ArrayXXd>(z.data() + 2 * n, nx_, ny_) *= mask_w_;
  }

  // Energy only, using scratch difference buffers (the cached z-state
  // differences survive, so quartic coefficients stay valid mid-line-search).
  double energy(const VectorXd& z) {
    differences(z, tdxu_, tdxv_, tdxw_, tdyu_, tdyv_, tdyw_);
    const int mx = nx_ - 1, my = ny_ - 1;
    const double q = 0.25 * dx_ * dy_;
    double elastic = 0.0;
    for (int sx = 0; sx <= 1; ++sx) {
      for (int sy = 0; sy <= 1; ++sy) {
        auto ax = tdxu_.block(0, sy, mx, my);
        auto wx = tdxw_.block(0, sy, mx, my);
        auto gv = tdxv_.block(0, sy, mx, my);
        auto ay = tdyv_.block(sx, 0, mx, my);
        auto wy = tdyw_.block(sx, 0, mx, my);
        auto gu = tdyu_.block(sx, 0, mx, my);
        ex_ = ax + 0.5 * wx.square();
        ey_ = ay + 0.5 * wy.square();
        gam_ = gu + gv + wx * wy;
        elastic += q * (s_ * (ex_ + ey_) + 0.5 * (ex_.square() + ey_.square()) +
                        nu_ * ex_ * ey_ + 0.25 * (1.0 - nu_) * gam_.square())
                           .sum();
      }
    }
    const int n = nx_ * ny_;
    const double load =
        (load_w_ * Map<const ArrayXXd>(z.data() + 2 * n, nx_, ny_)).sum();
    return elastic - load;
  }

  // Energy and masked gradient; also refreshes the cached z-differences that
  // quartic_coefficients() consumes.
  double energy_and_gradient(const VectorXd& z, VectorXd& grad) {
    differences(z, dxu_, dxv_, dxw_, dyu_, dyv_, dyw_);
    const int mx = nx_ - 1, my = ny_ - 1;
    const double q = 0.25 * dx_ * dy_;
    gdxu_.setZero(); gdxv_.setZero(); gdxw_.setZero();
    gdyu_.setZero(); gdyv_.setZero(); gdyw_.setZero();
    double elastic = 0.0;
    for (int sx = 0; sx <= 1; ++sx) {
      for (int sy = 0; sy <= 1; ++sy) {
        auto wx = dxw_.block(0, sy, mx, my);
        auto wy = dyw_.block(sx, 0, mx, my);
        ex_ = dxu_.block(0, sy, mx, my) + 0.5 * wx.square();
        ey_ = dyv_.block(sx, 0, mx, my) + 0.5 * wy.square();
        gam_ = dyu_.block(sx, 0, mx, my) + dxv_.block(0, sy, mx, my) + wx * wy;
        elastic += q * (s_ * (ex_ + ey_) + 0.5 * (ex_.square() + ey_.square()) +
                        nu_ * ex_ * ey_ + 0.25 * (1.0 - nu_) * gam_.square())
                           .sum();
        // Membrane stress resultants (scaled): energy derivative w.r.t. the
        // sampled strains.
        nxx_ = s_ + ex_ + nu_ * ey_;
        nyy_ = s_ + ey_ + nu_ * ex_;
        nxy_ = 0.5 * (1.0 - nu_) * gam_;
        gdxu_.block(0, sy, mx, my) += q * nxx_;
        gdyv_.block(sx, 0, mx, my) += q * nyy_;
        gdyu_.block(sx, 0, mx, my) += q * nxy_;
        gdxv_.block(0, sy, mx, my) += q * nxy_;
        gdxw_.block(0, sy, mx, my) += q * (nxx_ * wx + nxy_ * wy);
        gdyw_.block(sx, 0, mx, my) += q * (nyy_ * wy + nxy_ * wx);
      }
    }

    grad.setZero(dof());
    const int n = nx_ * ny_;
    Map<ArrayXXd> gu(grad.data(), nx_, ny_);
    Map<ArrayXXd> gv(grad.data() + n, nx_, ny_);
    Map<ArrayXXd> gw(grad.data() + 2 * n, nx_, ny_);
    scatter(gdxu_, gdyu_, gu);
    scatter(gdxv_, gdyv_, gv);
    scatter(gdxw_, gdyw_, gw);
    gw -= load_w_;
    gu *= mask_u_;
    gv *= mask_v_;
    gw *= mask_w_;

    const double load =
        (load_w_ * Map<const ArrayXXd>(z.data() + 2 * n, nx_, ny_)).sum();
    return elastic - load;
  }

  // Exact polynomial E(z + alpha d) = E(z) + c1 a + c2 a^2 + c3 a^3 + c4 a^4.
  // The energy is a quartic in the dofs, so this is not a model but the true
  // restriction; it relies on the z-differences cached by the last
  // energy_and_gradient(z) call.
  void quartic_coefficients(const VectorXd& d, double c[4]) {
    differences(d, tdxu_, tdxv_, tdxw_, tdyu_, tdyv_, tdyw_);
    const int mx = nx_ - 1, my = ny_ - 1;
    const double q = 0.25 * dx_ * dy_;
    c[0] = c[1] = c[2] = c[3] = 0.0;
    for (int sx = 0; sx <= 1; ++sx) {
      for (int sy = 0; sy <= 1; ++sy) {
        auto wx = dxw_.block(0, sy, mx, my);
        auto wy = dyw_.block(sx, 0, mx, my);
        auto dwx = tdxw_.block(0, sy, mx, my);
        auto dwy = tdyw_.block(sx, 0, mx, my);
        ex_ = dxu_.block(0, sy, mx, my) + 0.5 * wx.square();
        ey_ = dyv_.block(sx, 0, mx, my) + 0.5 * wy.square();
        gam_ = dyu_.block(sx, 0, mx, my) + dxv_.block(0, sy, mx, my) + wx * wy;
        // Strain increments: eps(alpha) = eps0 + alpha*lambda + alpha^2*mu.
        lx_ = tdxu_.block(0, sy, mx, my) + wx * dwx;
        ly_ = tdyv_.block(sx, 0, mx, my) + wy * dwy;
        lg_ = tdyu_.block(sx, 0, mx, my) + tdxv_.block(0, sy, mx, my) +
              wx * dwy + dwx * wy;
        mux_ = 0.5 * dwx.square();
        muy_ = 0.5 * dwy.square();
        mug_ = dwx * dwy;
        c[0] += q * (s_ * (lx_ + ly_) + bilinear_form(nu_, ex_, ey_, gam_, lx_, ly_, lg_)).sum();
        c[1] += q * (s_ * (mux_ + muy_) +
                     bilinear_form(nu_, ex_, ey_, gam_, mux_, muy_, mug_) +
                     0.5 * bilinear_form(nu_, lx_, ly_, lg_, lx_, ly_, lg_))
                        .sum();
        c[2] += q * bilinear_form(nu_, lx_, ly_, lg_, mux_, muy_, mug_).sum();
        c[3] += q * 0.5 * bilinear_form(nu_, mux_, muy_, mug_, mux_, muy_, mug_).sum();
      }
    }
    const int n = nx_ * ny_;
    c[0] -= (load_w_ * Map<const ArrayXXd>(d.data() + 2 * n, nx_, ny_)).sum();
  }

  // Diagonal preconditioner: the in-plane Hessian block scales like 1 in the
  // nondimensional modulus while the w block scales like s + O(w'^2), so
  // multiplying the in-plane gradient by that small factor equilibrates the
  // two (the overall scale is absorbed by the line search).
  void apply_metric(const VectorXd& g, double m_uv, VectorXd& out) const {
    const int n = nx_ * ny_;
    out.resize(dof());
    out.head(2 * n) = g.head(2 * n) * m_uv;
    out.tail(n) = g.tail(n);
  }

 private:
  void differences(const VectorXd& z, ArrayXXd& dxu, ArrayXXd& dxv, ArrayXXd& dxw,
                   ArrayXXd& dyu, ArrayXXd& dyv, ArrayXXd& dyw) const {
    const int n = nx_ * ny_;
    Map<const ArrayXXd> u(z.data(), nx_, ny_);
    Map<const ArrayXXd> v(z.data() + n, nx_, ny_);
    Map<const ArrayXXd> w(z.data() + 2 * n, nx_, ny_);
    const int mx = nx_ - 1, my = ny_ - 1;
    dxu = (u.block(1, 0, mx, ny_) - u.block(0, 0, mx, ny_)) / dx_;
    dxv = (v.block(1, 0, mx, ny_) - v.block(0, 0, mx, ny_)) / dx_;
    dxw = (w.block(1, 0, mx, ny_) - w.block(0, 0, mx, ny_)) / dx_;
    dyu = (u.block(0, 1, nx_, my) - u.block(0, 0, nx_, my)) / dy_;
    dyv = (v.block(0, 1, nx_, my) - v.block(0, 0, nx_, my)) / dy_;
    dyw = (w.block(0, 1, nx_, my) - w.block(0, 0, nx_, my)) / dy_;
  }

  // Chain rule from edge differences back to nodes: an x-edge difference
  // contributes +1/dx to its right node and -1/dx to its left node.
  void scatter(const ArrayXXd& gdx, const ArrayXXd& gdy, Map<ArrayXXd>& out) const {
    const int mx = nx_ - 1, my = ny_ - 1;
    out.block(1, 0, mx, ny_) += gdx / dx_;
    out.block(0, 0, mx, ny_) -= gdx / dx_;
    out.block(0, 1, nx_, my) += gdy / dy_;
    out.block(0, 0, nx_, my) -= gdy / dy_;
  }

  int nx_, ny_;
  double dx_, dy_;
  double s_, nu_;
  ArrayXXd mask_u_, mask_v_, mask_w_;
  ArrayXXd load_w_;
  double load_norm_ = 0.0;
  int n_free_ = 0;

  // z-state difference cache (energy_and_gradient) and trial scratch.
  ArrayXXd dxu_, dxv_, dxw_, dyu_, dyv_, dyw_;
  ArrayXXd tdxu_, tdxv_, tdxw_, tdyu_, tdyv_, tdyw_;
  ArrayXXd gdxu_, gdxv_, gdxw_, gdyu_, gdyv_, gdyw_;
  ArrayXXd ex_, ey_, gam_, nxx_, nyy_, nxy_;
  ArrayXXd lx_, ly_, lg_, mux_, muy_, mug_;
};

// Smallest positive stationary point of the exact quartic; the energy is
// bounded below along any direction (c4 >= 0), and c4 = 0 forces c3 = 0, so
// the remaining cases are genuinely quadratic or degenerate.
double quartic_step(const double c[4]) {
  const double d0 = c[0], d1 = 2.0 * c[1], d2 = 3.0 * c[2], d3 = 4.0 * c[3];
  auto dphi = [&](double a) { return d0 + a * (d1 + a * (d2 + a * d3)); };
  if (d3 > 0.0) {
    double hi = 1.0;
    int guard = 0;
    while (dphi(hi) < 0.0 && guard++ < 400) hi *= 2.0;
    if (dphi(hi) < 0.0) return 1.0;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (dphi(mid) < 0.0)
        lo = mid;
      else
        hi = mid;
      if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
  }
  if (d1 > 0.0) return -d0 / d1;
  return 1.0;
}

struct MinimizeResult {
  bool converged = false;
  double residual = 0.0;
  int iterations = 0;
  double energy = 0.0;
};

// Preconditioned Polak-Ribiere+ nonlinear CG with the exact-quartic line
// search (safeguarded by halving). m_uv equilibrates the in-plane block,
// whose stiffness scales like s + O(w^2) against 1 for the w block.
MinimizeResult minimize(MembraneProblem& prob, VectorXd& z, double m_uv,
                        int max_iterations, double tolerance,
                        std::vector<double>* trace) {
  prob.zero_fixed(z);
  VectorXd g(prob.dof()), mg(prob.dof()), d(prob.dof());
  VectorXd g_prev(prob.dof());
  double energy = prob.energy_and_gradient(z, g);
  prob.apply_metric(g, m_uv, mg);
  double g_dot_mg = g.dot(mg);
  d = -mg;
  if (trace) trace->push_back(energy);

  MinimizeResult res;
  const int restart_period = prob.free_dof();
  int since_restart = 0;
  bool fresh_descent = true;

  int iter = 0;
  for (; iter < max_iterations; ++iter) {
    res.residual = g.norm() / prob.load_norm();
    res.iterations = iter;
    res.energy = energy;
    if (res.residual <= tolerance) {
      res.converged = true;
      return res;
    }

    double gd = g.dot(d);
    if (gd >= 0.0) {  // not a descent direction; restart
      d = -mg;
      gd = -g_dot_mg;
      since_restart = 0;
      fresh_descent = true;
    }

    double c[4];
    prob.quartic_coefficients(d, c);
    double alpha = quartic_step(c);
    if (!(alpha > 0.0) || !std::isfinite(alpha)) alpha = 1.0;

    // The quartic is the exact restriction of the energy, so the step's
    // energy change is evaluated in coefficient form; comparing full
    // energies instead would drown the late decrements in summation noise.
    auto poly_delta = [&c](double a) {
      return ((c[3] * a + c[2]) * a + c[1]) * a * a + c[0] * a;
    };
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      if (poly_delta(alpha) < 0.0) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      if (fresh_descent) break;  // at the numerical floor for this state
      d = -mg;
      since_restart = 0;
      fresh_descent = true;
      --iter;  // retry the step along steepest descent
      continue;
    }

    z += alpha * d;
    g_prev.swap(g);
    const double g_dot_mg_prev = g_dot_mg;
    energy = prob.energy_and_gradient(z, g);
    prob.apply_metric(g, m_uv, mg);
    g_dot_mg = g.dot(mg);
    if (trace) trace->push_back(energy);

    double beta = (g_dot_mg - g_prev.dot(mg)) / g_dot_mg_prev;
    beta = std::max(0.0, beta);
    if (++since_restart >= restart_period) {
      beta = 0.0;
      since_restart = 0;
    }
    d = beta * d - mg;
    fresh_descent = beta == 0.0;
  }

  res.residual = g.norm() / prob.load_norm();
  res.energy = energy;
  res.iterations = iter;  // accepted steps, whether the loop broke or ran out
  res.converged = res.residual <= tolerance;
  return res;
}

struct Scales {
  double a, t, r, e_prime, s, p_hat, h_hat;
};

Scales make_scales(const MembraneGeometry& g, const MaterialParams& m,
                   double pressure) {
  require(std::isfinite(pressure) && pressure > 0.0, ErrorCode::InvalidArgument,
          "pressure must be positive and finite, got " + fmt(pressure));
  require(m.residual_stress_sigma0 > 0.0, ErrorCode::InvalidArgument,
          "the membrane solver needs tensile residual stress (sigma0 > 0); a "
          "compressive film is not a taut membrane");
  Scales sc;
  sc.a = g.half_width_a;
  sc.t = g.thickness_t;
  sc.r = g.aspect_ratio();
  sc.e_prime = m.youngs_modulus_E / (1.0 - m.poisson_nu * m.poisson_nu);
  sc.s = m.residual_stress_sigma0 / sc.e_prime;
  sc.p_hat = pressure * sc.a / (sc.e_prime * sc.t);
  double A, B;
  estimate_linear_cubic(g, m, &A, &B);
  sc.h_hat = estimate_deflection(A, B, pressure) / sc.a;
  return sc;
}

// Full <-> quarter transfers. On the quarter grid, local (0, 0) is the window
// centre; full-grid index (ic + i, jc + j) maps to local (i, j).
ArrayXXd quarter_from_full(const ArrayXXd& full, int qnx, int qny) {
  return full.block(qnx - 1, qny - 1, qnx, qny);
}

ArrayXXd full_from_quarter(const ArrayXXd& quarter, int nx, int ny, double odd_x,
                           double odd_y) {
  const int ic = (nx - 1) / 2, jc = (ny - 1) / 2;
  ArrayXXd full(nx, ny);
  for (int i = 0; i < nx; ++i) {
    const int di = std::abs(i - ic);
    const double sx = (i < ic && odd_x != 0.0) ? -1.0 : 1.0;
    for (int j = 0; j < ny; ++j) {
      const int dj = std::abs(j - jc);
      const double sy = (j < jc && odd_y != 0.0) ? -1.0 : 1.0;
      full(i, j) = sx * sy * quarter(di, dj);
    }
  }
  return full;
}

DeflectionField solve_impl(const MembraneGeometry& geometry,
                           const MaterialParams& material, double pressure,
                           const SolverConfig& config,
                           const DeflectionField* initial) {
  config.validate();
  const Scales sc = make_scales(geometry, material, pressure);
  const int nx = config.grid_nx, ny = config.grid_ny;
  const double dx = 2.0 / (nx - 1);
  const double dy = 2.0 * sc.r / (ny - 1);
  const bool quarter = config.symmetry_reduction;
  const int pnx = quarter ? (nx + 1) / 2 : nx;
  const int pny = quarter ? (ny + 1) / 2 : ny;

  MembraneProblem prob(pnx, pny, dx, dy, quarter, sc.s, material.poisson_nu,
                       sc.p_hat);

  VectorXd z = VectorXd::Zero(prob.dof());
  if (initial) {
    require(initial->w.rows() == nx && initial->w.cols() == ny &&
                initial->u.rows() == nx && initial->u.cols() == ny &&
                initial->v.rows() == nx && initial->v.cols() == ny,
            ErrorCode::InvalidArgument,
            "warm-start field does not match the configured grid");
    const int n = pnx * pny;
    auto put = [&](const ArrayXXd& full, int offset) {
      Map<ArrayXXd> slot(z.data() + offset, pnx, pny);
      slot = (quarter ? quarter_from_full(full, pnx, pny) : full) / sc.a;
    };
    put(initial->u, 0);
    put(initial->v, n);
    put(initial->w, 2 * n);
    prob.zero_fixed(z);
  }

  const double m_uv = sc.s + sc.h_hat * sc.h_hat;
  std::vector<double> trace;
  MinimizeResult min = minimize(prob, z, m_uv, config.max_iterations,
                                config.gradient_tolerance,
                                config.record_energy_trace ? &trace : nullptr);

  if (!min.converged && config.throw_on_nonconvergence) {
    fail(ErrorCode::NotConverged,
         "membrane solve stopped after " + std::to_string(min.iterations) +
             " iterations above tolerance " + fmt(config.gradient_tolerance) +
             " (residual " + fmt(min.residual) + ", pressure " +
             fmt(pressure) + " Pa, grid " + std::to_string(nx) + "x" +
             std::to_string(ny) + ")");
  }

  DeflectionField field;
  const int n = pnx * pny;
  Map<const ArrayXXd> u(z.data(), pnx, pny);
  Map<const ArrayXXd> v(z.data() + n, pnx, pny);
  Map<const ArrayXXd> w(z.data() + 2 * n, pnx, pny);
  if (quarter) {
    field.u = sc.a * full_from_quarter(u, nx, ny, 1.0, 0.0);
    field.v = sc.a * full_from_quarter(v, nx, ny, 0.0, 1.0);
    field.w = sc.a * full_from_quarter(w, nx, ny, 0.0, 0.0);
  } else {
    field.u = sc.a * u;
    field.v = sc.a * v;
    field.w = sc.a * w;
  }
  field.x = Eigen::VectorXd::LinSpaced(nx, -sc.a, sc.a);
  field.y = Eigen::VectorXd::LinSpaced(ny, -sc.r * sc.a, sc.r * sc.a);
  field.converged = min.converged;
  field.residual_norm = min.residual;
  field.iterations = min.iterations;
  field.energy = min.energy;
  field.energy_trace = std::move(trace);
  return field;
}

std::vector<double> ladder_pressures(const MembraneGeometry& g,
                                     const MaterialParams& m) {
  double A, B;
  estimate_linear_cubic(g, m, &A, &B);
  const double h_lo = 0.5 * g.thickness_t;
  const double h_hi = 500.0 * g.thickness_t;
  const int n = 12;
  std::vector<double> pressures;
  pressures.reserve(n);
  for (int k = 0; k < n; ++k) {
    const double h = h_lo * std::pow(h_hi / h_lo, double(k) / (n - 1));
    pressures.push_back(A * h + B * h * h * h);
  }
  return pressures;
}

CoefficientExtraction extract_impl(const MembraneGeometry& geometry,
                                   const MaterialParams& material,
                                   const SolverConfig& config,
                                   std::vector<DeflectionField>* warm_io) {
  config.validate();
  require(material.residual_stress_sigma0 > 0.0, ErrorCode::InvalidArgument,
          "coefficient extraction needs tensile residual stress (sigma0 > 0)");

  std::vector<double> pressures = config.pressure_steps;
  if (pressures.empty()) {
    pressures = ladder_pressures(geometry, material);
  } else {
    require(pressures.size() >= 3, ErrorCode::TooFewPoints,
            "need at least 3 pressure steps to separate the linear and cubic "
            "terms, got " + std::to_string(pressures.size()));
    for (std::size_t i = 0; i < pressures.size(); ++i) {
      require(std::isfinite(pressures[i]) && pressures[i] > 0.0,
              ErrorCode::InvalidArgument, "pressure steps must be positive");
      require(i == 0 || pressures[i] > pressures[i - 1],
              ErrorCode::MonotonicityError,
              "pressure steps must be strictly increasing");
    }
  }

  const bool reuse_warm =
      warm_io && warm_io->size() == pressures.size() &&
      (*warm_io)[0].w.rows() == config.grid_nx &&
      (*warm_io)[0].w.cols() == config.grid_ny;
  if (warm_io && !reuse_warm) warm_io->clear();

  CoefficientExtraction out;
  out.samples.reserve(pressures.size());
  DeflectionField prev;
  bool have_prev = false;
  for (std::size_t k = 0; k < pressures.size(); ++k) {
    DeflectionField field;
    if (reuse_warm) {
      field = solve_impl(geometry, material, pressures[k], config, &(*warm_io)[k]);
    } else if (have_prev) {
      field = solve_impl(geometry, material, pressures[k], config, &prev);
    } else {
      field = solve_impl(geometry, material, pressures[k], config, nullptr);
    }
    const double h = field.center_deflection();
    require(h > 0.0, ErrorCode::PoorFit,
            "solver returned a non-positive centre deflection at pressure " +
                fmt(pressures[k]) + " Pa");
    out.samples.push_back({pressures[k], h});
    if (warm_io) {
      if (reuse_warm)
        (*warm_io)[k] = field;
      else
        warm_io->push_back(field);
    }
    prev = std::move(field);
    have_prev = true;
  }

  // Relative least squares for P = A h + B h^3: rows (h/P, h^3/P) -> 1.
  const int m = static_cast<int>(out.samples.size());
  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(m);
  for (int i = 0; i < m; ++i) {
    const double h = out.samples[i].deflection;
    const double p = out.samples[i].pressure;
    design(i, 0) = h / p;
    design(i, 1) = h * h * h / p;
  }
  const Eigen::Vector2d ab = design.colPivHouseholderQr().solve(rhs);
  const double A = ab(0), B = ab(1);
  require(A > 0.0 && B > 0.0, ErrorCode::PoorFit,
          "pressure ladder did not yield positive linear and cubic terms");

  out.rel_residual = std::sqrt((design * ab - rhs).squaredNorm() / m);
  require(out.rel_residual <= 0.01, ErrorCode::PoorFit,
          "two-term model misses the solver ladder by " +
              fmt(100.0 * out.rel_residual) + "% RMS (limit 1%)");

  const double a = geometry.half_width_a, t = geometry.thickness_t;
  out.c1 = A * a * a / (t * material.residual_stress_sigma0);
  out.f = B * a * a * a * a * (1.0 - material.poisson_nu) /
          (material.youngs_modulus_E * t);
  return out;
}

int derived_ny(int nx, double ratio) {
  // Keeps dy == 2*dx independent of ratio (exactly so when (nx-1)*ratio/2 is
  // even), so table trends in ratio are not polluted by grid snapping.
  int e = 2 * static_cast<int>(std::lround((nx - 1) * ratio / 4.0));
  e = std::max(e, 16);
  return e + 1;
}

}  // namespace

void SolverConfig::validate() const {
  require(grid_nx >= 17 && grid_ny >= 17, ErrorCode::InvalidArgument,
          "solver grid must be at least 17x17 nodes");
  require(grid_nx % 2 == 1 && grid_ny % 2 == 1, ErrorCode::InvalidArgument,
          "solver grid node counts must be odd so the centre is a node");
  require(max_iterations > 0, ErrorCode::InvalidArgument,
          "max_iterations must be positive");
  require(std::isfinite(gradient_tolerance) && gradient_tolerance > 0.0 &&
              gradient_tolerance <= 1e-4,
          ErrorCode::InvalidArgument,
          "gradient_tolerance must lie in (0, 1e-4]");
}

double DeflectionField::center_deflection() const {
  require(w.size() > 0, ErrorCode::InvalidArgument, "empty deflection field");
  return w(static_cast<Eigen::Index>((w.rows() - 1) / 2),
           static_cast<Eigen::Index>((w.cols() - 1) / 2));
}

Eigen::VectorXd DeflectionField::midline_w() const {
  require(w.size() > 0, ErrorCode::InvalidArgument, "empty deflection field");
  return w.col((w.cols() - 1) / 2).matrix();
}

DeflectionField solve_membrane(const MembraneGeometry& geometry,
                               const MaterialParams& material, double pressure,
                               const SolverConfig& config) {
  return solve_impl(geometry, material, pressure, config, nullptr);
}

DeflectionField solve_membrane(const MembraneGeometry& geometry,
                               const MaterialParams& material, double pressure,
                               const SolverConfig& config,
                               const DeflectionField& initial) {
  return solve_impl(geometry, material, pressure, config, &initial);
}

CoefficientExtraction extract_coefficients(const MembraneGeometry& geometry,
                                           const MaterialParams& material,
                                           const SolverConfig& config) {
  return extract_impl(geometry, material, config, nullptr);
}

CoefficientTable build_coefficient_table(std::vector<double> aspect_ratios,
                                         std::vector<double> nus,
                                         const SolverConfig& config,
                                         const TableProgress& progress) {
  require(!aspect_ratios.empty() && !nus.empty(), ErrorCode::InvalidArgument,
          "table needs at least one aspect ratio and one Poisson ratio");
  std::sort(aspect_ratios.begin(), aspect_ratios.end());
  std::sort(nus.begin(), nus.end());
  aspect_ratios.erase(std::unique(aspect_ratios.begin(), aspect_ratios.end()),
                      aspect_ratios.end());
  nus.erase(std::unique(nus.begin(), nus.end()), nus.end());
  for (double r : aspect_ratios)
    require(std::isfinite(r) && r >= 1.0 && r <= 16.0, ErrorCode::InvalidArgument,
            "table aspect ratios must lie in [1, 16], got " + fmt(r));
  for (double nu : nus)
    require(std::isfinite(nu) && nu > -0.5 && nu < 0.5, ErrorCode::InvalidArgument,
            "table Poisson ratios must lie in (-0.5, 0.5), got " + fmt(nu));

  // Internal reference scales; the extracted coefficients are dimensionless
  // and independent of them (checked by the scale-invariance property test).
  const double a_ref = 0.5e-3, t_ref = 100e-9;
  const double e_ref = 220e9, sigma_ref = 50e6;

  std::vector<CoefficientEntry> entries;
  entries.reserve(aspect_ratios.size() * nus.size());
  std::vector<std::string> failures;

  for (double ratio : aspect_ratios) {
    SolverConfig cfg = config;
    cfg.grid_ny = derived_ny(cfg.grid_nx, ratio);
    cfg.record_energy_trace = false;
    std::vector<DeflectionField> warm;
    for (double nu : nus) {
      const MembraneGeometry geom(a_ref, ratio * a_ref, t_ref);
      const MaterialParams mat(e_ref, nu, sigma_ref);
      try {
        const CoefficientExtraction ex = extract_impl(geom, mat, cfg, &warm);
        entries.push_back({ratio, nu, ex.c1, ex.f});
        if (progress) progress(ratio, nu, ex.c1, ex.f);
      } catch (const Error& e) {
        failures.push_back("ratio " + fmt(ratio) + ", nu " + fmt(nu) + ": " +
                           e.what());
        warm.clear();
      }
    }
  }

  if (!failures.empty()) {
    std::string msg = std::to_string(failures.size()) +
                      " table entries failed:";
    for (const auto& f : failures) msg += "\n  " + f;
    fail(ErrorCode::NotConverged, msg);
  }

  std::ostringstream prov;
  prov << "bulgekit " << kVersion << "; membrane solver, grid_nx="
       << config.grid_nx << " (dy=2*dx), tol=" << config.gradient_tolerance
       << "; reference a=0.5 mm, t=100 nm, E=220 GPa, sigma0=50 MPa; "
       << "12-step ladder h/t in [0.5, 500]";
  return CoefficientTable(std::move(entries), prov.str());
}

double linear_center_deflection(const MembraneGeometry& geometry,
                                const MaterialParams& material, double pressure) {
  require(material.residual_stress_sigma0 > 0.0, ErrorCode::InvalidArgument,
          "linear membrane deflection needs tensile residual stress");
  const double a = geometry.half_width_a;
  return phi_center(geometry.aspect_ratio()) * pressure * a * a /
         (material.residual_stress_sigma0 * geometry.thickness_t);
}

}  // namespace bulge
