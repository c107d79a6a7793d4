#include "simresnet/shakedown.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "simresnet/errors.hpp"

namespace simresnet {

namespace {

using nlohmann::json;

// Eigendecomposition of the fixed von Mises quadratic form
//   q(s) = s^T Q s,  Q = [[1, -1/2, 0], [-1/2, 1, 0], [0, 0, 3]].
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kEig[3] = {0.5, 1.5, 3.0};

// Rows are the orthonormal eigenvectors.
inline void to_eigen_basis(const double s[3], double out[3]) {
  out[0] = kInvSqrt2 * (s[0] + s[1]);
  out[1] = kInvSqrt2 * (s[0] - s[1]);
  out[2] = s[2];
}

inline void from_eigen_basis(const double e[3], double out[3]) {
  out[0] = kInvSqrt2 * (e[0] + e[1]);
  out[1] = kInvSqrt2 * (e[0] - e[1]);
  out[2] = e[2];
}

inline double q_form(const double s[3]) {
  return s[0] * s[0] - s[0] * s[1] + s[1] * s[1] + 3.0 * s[2] * s[2];
}

// Projects p onto {x : q(x + c) <= r^2}. Exact up to the scalar root solve:
// in the eigenbasis the KKT point is y_i = p_i / (1 + lambda q_i) with
// g(lambda) = q(y) - r^2 monotone decreasing on lambda >= 0.
void project_ellipsoid(double p[3], const double c[3], double r) {
  double shifted[3] = {p[0] + c[0], p[1] + c[1], p[2] + c[2]};
  if (q_form(shifted) <= r * r) return;

  double e[3];
  to_eigen_basis(shifted, e);
  auto g = [&](double lam) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      double denom = 1.0 + lam * kEig[i];
      acc += kEig[i] * e[i] * e[i] / (denom * denom);
    }
    return acc - r * r;
  };

  double lo = 0.0, hi = 1.0;
  while (g(hi) > 0.0) hi *= 2.0;
  for (int it = 0; it < 120; ++it) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  double lam = 0.5 * (lo + hi);

  double y[3];
  for (int i = 0; i < 3; ++i) y[i] = e[i] / (1.0 + lam * kEig[i]);
  double back[3];
  from_eigen_basis(y, back);
  for (int i = 0; i < 3; ++i) p[i] = back[i] - c[i];
}

// Orthonormal basis of the equilibrium row space (modified Gram-Schmidt,
// two passes); projection onto the null space subtracts these components.
std::vector<Vec> row_space_basis(const Mat& rows) {
  std::vector<Vec> basis;
  double scale = 0.0;
  for (double v : rows.data) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return basis;

  for (std::size_t r = 0; r < rows.rows; ++r) {
    Vec v(rows.cols);
    for (std::size_t c = 0; c < rows.cols; ++c) v[c] = rows(r, c);
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& b : basis) {
        double proj = dot(b, v);
        for (std::size_t c = 0; c < v.size(); ++c) v[c] -= proj * b[c];
      }
    double norm = std::sqrt(dot(v, v));
    if (norm > 1e-12 * scale) {
      for (double& x : v) x /= norm;
      basis.push_back(std::move(v));
    }
  }
  return basis;
}

double max_equilibrium_residual(const Mat& rows, const Vec& rho) {
  double worst = 0.0;
  for (std::size_t r = 0; r < rows.rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < rows.cols; ++c) acc += rows(r, c) * rho[c];
    worst = std::max(worst, std::abs(acc));
  }
  return worst;
}

std::vector<StressVec> unstack(const Vec& rho) {
  std::vector<StressVec> out(rho.size() / 3);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = {rho[3 * i], rho[3 * i + 1], rho[3 * i + 2]};
  return out;
}

// Core loop shared by feasible() and the warm-started solver path.
std::optional<Vec> feasible_impl(const ShakedownInstance& inst, double alpha,
                                 double tol, std::size_t max_iter,
                                 const std::vector<Vec>& null_basis,
                                 Vec rho) {
  const std::size_t ng = inst.gauss_point_count();

  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    // (a) exact projection onto the equilibrium null space
    for (const Vec& b : null_basis) {
      double proj = dot(b, rho);
      for (std::size_t c = 0; c < rho.size(); ++c) rho[c] -= proj * b[c];
    }

    bool ok = max_equilibrium_residual(inst.equilibrium.rows, rho) <= tol;
    for (std::size_t i = 0; ok && i < ng; ++i) {
      const GaussPointData& pt = inst.points[i];
      const double* r3 = &rho[3 * i];
      for (const StressVec& se : pt.elastic_stress) {
        StressVec total{r3[0] + alpha * se.sxx, r3[1] + alpha * se.syy,
                        r3[2] + alpha * se.txy};
        if (von_mises(total) > pt.yield_strength + tol) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return rho;

    // (b) cyclic projection onto every (point, vertex) ellipsoid
    for (std::size_t i = 0; i < ng; ++i) {
      const GaussPointData& pt = inst.points[i];
      double* r3 = &rho[3 * i];
      for (const StressVec& se : pt.elastic_stress) {
        double center[3] = {alpha * se.sxx, alpha * se.syy, alpha * se.txy};
        project_ellipsoid(r3, center, pt.yield_strength);
      }
    }
  }
  return std::nullopt;
}

}  // namespace

double von_mises(const StressVec& s) {
  return std::sqrt(s.sxx * s.sxx - s.sxx * s.syy + s.syy * s.syy +
                   3.0 * s.txy * s.txy);
}

void ShakedownInstance::validate() const {
  if (points.empty()) throw std::invalid_argument("instance: no Gauss points");
  const std::size_t nv = points.front().elastic_stress.size();
  if (nv == 0) throw std::invalid_argument("instance: NV must be >= 1");
  for (const GaussPointData& pt : points) {
    if (pt.elastic_stress.size() != nv)
      throw std::invalid_argument("instance: points disagree on vertex count");
    if (!(pt.yield_strength > 0.0))
      throw std::invalid_argument("instance: yield strength must be positive");
    for (const StressVec& s : pt.elastic_stress)
      if (!std::isfinite(s.sxx) || !std::isfinite(s.syy) || !std::isfinite(s.txy))
        throw std::invalid_argument("instance: non-finite elastic stress");
  }
  if (equilibrium.rows.rows > 0 && equilibrium.rows.cols != 3 * points.size())
    throw std::invalid_argument("instance: equilibrium column count must be 3*NG");
}

double default_feasibility_tol(const ShakedownInstance& inst) {
  double sy_max = 0.0;
  for (const GaussPointData& pt : inst.points)
    sy_max = std::max(sy_max, pt.yield_strength);
  return 1e-6 * sy_max;
}

std::optional<std::vector<StressVec>> feasible(const ShakedownInstance& inst,
                                               double alpha, double tol,
                                               std::size_t max_iter) {
  inst.validate();
  if (alpha < 0.0) throw std::invalid_argument("feasible: alpha must be >= 0");
  if (!(tol > 0.0)) throw std::invalid_argument("feasible: tol must be > 0");

  std::vector<Vec> basis = row_space_basis(inst.equilibrium.rows);
  auto rho = feasible_impl(inst, alpha, tol, max_iter, basis,
                           Vec(3 * inst.gauss_point_count(), 0.0));
  if (!rho) return std::nullopt;
  return unstack(*rho);
}

ShakedownSolution shakedown_factor(const ShakedownInstance& inst,
                                   const SolverSettings& settings) {
  inst.validate();
  const double tol =
      settings.tol_feas > 0.0 ? settings.tol_feas : default_feasibility_tol(inst);

  // Elastic-limit lower bound: rho = 0 is feasible there by construction.
  double alpha_elastic = std::numeric_limits<double>::infinity();
  for (const GaussPointData& pt : inst.points)
    for (const StressVec& se : pt.elastic_stress) {
      double vm = von_mises(se);
      if (vm > 0.0) alpha_elastic = std::min(alpha_elastic, pt.yield_strength / vm);
    }
  if (!std::isfinite(alpha_elastic))
    throw UnboundedAlphaError("shakedown_factor: all elastic stresses vanish");

  std::vector<Vec> basis = row_space_basis(inst.equilibrium.rows);
  const std::size_t n = 3 * inst.gauss_point_count();

  double lo = alpha_elastic;
  Vec best(n, 0.0);

  // Doubling bracket, warm-starting each probe from the last certificate.
  double hi = alpha_elastic;
  for (int doublings = 0;; ++doublings) {
    if (doublings > 60)
      throw UnboundedAlphaError("shakedown_factor: no infeasible upper bracket found");
    hi *= 2.0;
    auto rho = feasible_impl(inst, hi, tol, settings.max_iter, basis, best);
    if (!rho) break;
    lo = hi;
    best = *rho;
  }

  while (hi - lo > settings.tol_bisect * lo) {
    double mid = 0.5 * (lo + hi);
    auto rho = feasible_impl(inst, mid, tol, settings.max_iter, basis, best);
    if (rho) {
      lo = mid;
      best = *rho;
    } else {
      hi = mid;
    }
  }
  return {lo, unstack(best)};
}

double brute_force_factor(const ShakedownInstance& inst, double grid_step) {
  inst.validate();
  if (!(grid_step > 0.0)) throw std::invalid_argument("brute_force_factor: grid_step must be > 0");
  if (inst.gauss_point_count() > 2 || inst.vertex_count() > 2)
    throw OracleScopeError("brute_force_factor: instance too large (NG <= 2, NV <= 2)");

  // Diagonal equilibrium only: each row may touch a single component, which
  // pins that residual component to zero.
  std::vector<bool> pinned(3 * inst.gauss_point_count(), false);
  const Mat& rows = inst.equilibrium.rows;
  for (std::size_t r = 0; r < rows.rows; ++r) {
    int nonzero = -1;
    for (std::size_t c = 0; c < rows.cols; ++c) {
      if (rows(r, c) != 0.0) {
        if (nonzero >= 0)
          throw OracleScopeError("brute_force_factor: equilibrium is not diagonal");
        nonzero = static_cast<int>(c);
      }
    }
    if (nonzero >= 0) pinned[static_cast<std::size_t>(nonzero)] = true;
  }

  double sy_max = 0.0;
  for (const GaussPointData& pt : inst.points)
    sy_max = std::max(sy_max, pt.yield_strength);

  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inst.gauss_point_count(); ++i) {
    const GaussPointData& pt = inst.points[i];
    const double r2 = pt.yield_strength * pt.yield_strength;

    // Grid values per free component, symmetric around 0 so the zero
    // residual is always representable; pinned components stay at zero.
    const auto half_steps = static_cast<long>(sy_max / grid_step);
    std::vector<std::vector<double>> axes(3);
    for (std::size_t c = 0; c < 3; ++c) {
      if (pinned[3 * i + c]) {
        axes[c] = {0.0};
      } else {
        for (long k = -half_steps; k <= half_steps; ++k)
          axes[c].push_back(static_cast<double>(k) * grid_step);
      }
    }

    // For each grid residual, the admissible alpha window per vertex is a
    // quadratic inequality; the point's best alpha is the max over the grid
    // of the window intersection.
    double best_pt = 0.0;
    bool bounded = false;
    for (double r0 : axes[0])
      for (double r1 : axes[1])
        for (double r2v : axes[2]) {
          const double rho[3] = {r0, r1, r2v};
          const double q_rho = q_form(rho);
          double window_lo = 0.0;
          double window_hi = std::numeric_limits<double>::infinity();
          bool dead = false;
          for (const StressVec& se : pt.elastic_stress) {
            const double sv[3] = {se.sxx, se.syy, se.txy};
            const double qa = q_form(sv);
            // cross term rho^T Q sigma
            const double qb =
                2.0 * (rho[0] * sv[0] + rho[1] * sv[1] - 0.5 * (rho[0] * sv[1] + rho[1] * sv[0]) +
                       3.0 * rho[2] * sv[2]);
            const double qc = q_rho - r2;
            if (qa <= 1e-12 * r2) {
              if (qc > 0.0) { dead = true; break; }  // alpha-independent violation
              continue;
            }
            const double disc = qb * qb - 4.0 * qa * qc;
            if (disc < 0.0) { dead = true; break; }
            const double sq = std::sqrt(disc);
            window_lo = std::max(window_lo, (-qb - sq) / (2.0 * qa));
            window_hi = std::min(window_hi, (-qb + sq) / (2.0 * qa));
          }
          if (dead || window_lo > window_hi) continue;
          if (std::isinf(window_hi)) continue;  // no vertex bounds this rho
          bounded = true;
          best_pt = std::max(best_pt, window_hi);
        }
    if (bounded) alpha = std::min(alpha, best_pt);
  }

  if (!std::isfinite(alpha))
    throw UnboundedAlphaError("brute_force_factor: no vertex bounds alpha");
  return alpha;
}

CertificateCheck check_certificate(const ShakedownInstance& inst, double alpha,
                                   const std::vector<StressVec>& residual) {
  inst.validate();
  if (residual.size() != inst.gauss_point_count())
    throw std::invalid_argument("check_certificate: residual size != NG");

  Vec rho(3 * residual.size());
  for (std::size_t i = 0; i < residual.size(); ++i) {
    rho[3 * i] = residual[i].sxx;
    rho[3 * i + 1] = residual[i].syy;
    rho[3 * i + 2] = residual[i].txy;
  }

  CertificateCheck check;
  check.max_equilibrium_residual = max_equilibrium_residual(inst.equilibrium.rows, rho);
  check.max_yield_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < inst.points.size(); ++i) {
    const GaussPointData& pt = inst.points[i];
    for (const StressVec& se : pt.elastic_stress) {
      StressVec total{residual[i].sxx + alpha * se.sxx,
                      residual[i].syy + alpha * se.syy,
                      residual[i].txy + alpha * se.txy};
      check.max_yield_excess =
          std::max(check.max_yield_excess, von_mises(total) - pt.yield_strength);
    }
  }
  return check;
}

ShakedownInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }

  try {
    ShakedownInstance inst;
    for (const json& jp : doc.at("points")) {
      GaussPointData pt;
      for (const json& js : jp.at("sigma_e")) {
        if (js.size() != 3) throw ParseError(path.string() + ": sigma_e entries need 3 components");
        pt.elastic_stress.push_back(
            {js[0].get<double>(), js[1].get<double>(), js[2].get<double>()});
      }
      pt.yield_strength = jp.at("sigma_y").get<double>();
      inst.points.push_back(std::move(pt));
    }
    const json& eq = doc.at("equilibrium");
    const json& jrows = eq.at("rows");
    const auto count = eq.at("count").get<std::size_t>();
    if (jrows.size() != count)
      throw ParseError(path.string() + ": equilibrium count does not match rows");
    inst.equilibrium.rows = Mat(count, 3 * inst.points.size());
    for (std::size_t r = 0; r < count; ++r) {
      if (jrows[r].size() != 3 * inst.points.size())
        throw ParseError(path.string() + ": equilibrium row length must be 3*NG");
      for (std::size_t c = 0; c < 3 * inst.points.size(); ++c)
        inst.equilibrium.rows(r, c) = jrows[r][c].get<double>();
    }
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void save_solution(const ShakedownInstance& inst, const ShakedownSolution& sol,
                   const CertificateCheck& check, double tol_feas,
                   const std::filesystem::path& path) {
  json residual = json::array();
  for (const StressVec& s : sol.residual)
    residual.push_back({s.sxx, s.syy, s.txy});
  json doc = {
      {"alpha", sol.alpha},
      {"residual", std::move(residual)},
      {"feasibility_report",
       {{"tol", tol_feas},
        {"max_equilibrium_residual", check.max_equilibrium_residual},
        {"max_yield_excess", check.max_yield_excess},
        {"passed", check.passes(tol_feas)},
        {"gauss_points", inst.gauss_point_count()},
        {"load_vertices", inst.vertex_count()}}},
  };
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace simresnet
