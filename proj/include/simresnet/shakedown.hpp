#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <vector>

#include "simresnet/linalg.hpp"

namespace simresnet {

// Plane-stress Voigt components, MPa.
struct StressVec {
  double sxx = 0.0;
  double syy = 0.0;
  double txy = 0.0;
};

// sqrt(sxx^2 - sxx*syy + syy^2 + 3*txy^2); the J2 yield condition is
// von_mises(sigma) <= sigma_Y.
double von_mises(const StressVec& s);

// One Gauss point: elastic stresses per load vertex and the yield strength.
struct GaussPointData {
  std::vector<StressVec> elastic_stress;  // NV entries
  double yield_strength = 0.0;            // sigma_Y > 0
};

// Discrete self-equilibrium constraint C rho = 0 over the stacked residual
// components; zero rows means the residual field is unconstrained.
struct EquilibriumOperator {
  Mat rows;  // m x 3*NG

  std::size_t constraint_count() const { return rows.rows; }
};

struct ShakedownInstance {
  std::vector<GaussPointData> points;
  EquilibriumOperator equilibrium;

  std::size_t gauss_point_count() const { return points.size(); }
  std::size_t vertex_count() const {
    return points.empty() ? 0 : points.front().elastic_stress.size();
  }
  void validate() const;
};

struct SolverSettings {
  double tol_bisect = 1e-3;     // relative bracket width
  double tol_feas = -1.0;       // < 0 selects 1e-6 * max sigma_Y
  std::size_t max_iter = 10000; // projection sweeps per feasibility call
};

// Seeks a residual field satisfying both constraint families at load factor
// alpha via alternating projections (equilibrium null space / per-point von
// Mises ellipsoids). Empty optional = not proven feasible within max_iter.
std::optional<std::vector<StressVec>> feasible(const ShakedownInstance& inst,
                                               double alpha, double tol,
                                               std::size_t max_iter);

struct ShakedownSolution {
  double alpha = 0.0;
  std::vector<StressVec> residual;
};

// Maximizes alpha: doubling bracket from the elastic-limit lower bound, then
// bisection to tol_bisect. Returns the largest alpha found feasible with its
// certificate.
ShakedownSolution shakedown_factor(const ShakedownInstance& inst,
                                   const SolverSettings& settings = {});

// Exhaustive oracle for tiny instances (NG <= 2, NV <= 2, free or diagonal
// equilibrium): grids residual components over [-max sigma_Y, +max sigma_Y]
// and returns the largest grid-feasible alpha. grid_step is in MPa.
double brute_force_factor(const ShakedownInstance& inst, double grid_step);

// Constraint residuals of a candidate certificate, computed directly from
// the definitions (independent of the solver path).
struct CertificateCheck {
  double max_equilibrium_residual = 0.0;  // ||C rho||_inf
  double max_yield_excess = 0.0;          // max von_mises - sigma_Y

  bool passes(double tol) const {
    return max_equilibrium_residual <= tol && max_yield_excess <= tol;
  }
};
CertificateCheck check_certificate(const ShakedownInstance& inst, double alpha,
                                   const std::vector<StressVec>& residual);

double default_feasibility_tol(const ShakedownInstance& inst);

// Instance / solution files (JSON).
ShakedownInstance load_instance(const std::filesystem::path& path);
void save_solution(const ShakedownInstance& inst, const ShakedownSolution& sol,
                   const CertificateCheck& check, double tol_feas,
                   const std::filesystem::path& path);

}  // namespace simresnet
