#pragma once

// Magnetic and electric potential families, the antisymmetric field matrix
// B = DA - DA^t with its trapping component, and numeric evaluators for the
// smallness hypotheses (Kato norm, weighted sup and radial-tangential norms).

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "magvirial/grid.hpp"

namespace magvirial {

class PotentialError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Real n x n matrix with M = -M^t. Entries are only written in mirrored
/// pairs, so antisymmetry holds exactly.
class AntisymMatrix {
 public:
  explicit AntisymMatrix(int dim);
  /// Throws PotentialError unless rows form an exactly antisymmetric square matrix.
  static AntisymMatrix from_rows(const std::vector<std::vector<double>>& rows);

  int dim() const noexcept { return dim_; }
  double operator()(int i, int j) const noexcept {
    return entries_[static_cast<std::size_t>(i * dim_ + j)];
  }
  /// Sets (i, j) = value and (j, i) = -value.
  void set(int i, int j, double value);

  AntisymMatrix scaled(double factor) const;
  std::vector<double> apply(std::span<const double> x) const;
  /// Row vector x^t M.
  std::vector<double> left_apply(std::span<const double> x) const;
  std::vector<std::vector<double>> rows() const;

 private:
  int dim_;
  std::vector<double> entries_;
};

/// sigma blocks on the diagonal; the trailing 1x1 (odd n) or 2x2 (even n >= 4)
/// block is zero.
AntisymMatrix build_M(int n);

enum class MagneticFamily { zero, linear_M, singular_r2, singular_cyl, custom_sampled };
enum class ElectricFamily { zero, inverse_quadratic, custom_sampled };

std::string to_string(MagneticFamily f);
std::string to_string(ElectricFamily f);
MagneticFamily magnetic_family_from_string(const std::string& s);
ElectricFamily electric_family_from_string(const std::string& s);

/// chi(r) = 1 for r <= inner, 0 for r >= outer, quintic smoothstep between.
struct Taper {
  double inner = 0.0;
  double outer = 0.0;

  double value(double r) const noexcept;
  double derivative(double r) const noexcept;
};

struct PotentialSpec {
  int dim = 2;
  MagneticFamily magnetic = MagneticFamily::zero;
  std::optional<AntisymMatrix> matrix;  // linear_M: A = chi(|x|) M x / 2
  /// Regularization of singular denominators, |x| -> sqrt(|x|^2 + eps^2).
  double epsilon = 0.0;
  /// Only valid for linear_M.
  std::optional<Taper> taper;

  ElectricFamily electric = ElectricFamily::zero;
  /// inverse_quadratic: V = coupling / (1 + |x|^2).
  double coupling = 0.0;

  std::shared_ptr<const VectorField> custom_A;
  std::shared_ptr<const RealField> custom_V;

  /// Throws PotentialError on an inconsistent spec.
  void validate() const;
  /// True for families whose trapping component vanishes identically.
  bool trapping_free() const noexcept;
};

/// Default linear_M spec, taper 0.8R..0.95R.
PotentialSpec linear_magnetic_spec(int n, double extent, double field_scale = 1.0);

// Point evaluators for the analytic families. Custom-sampled families only
// exist as grid samples and are rejected here.
std::vector<double> eval_A(const PotentialSpec& spec, std::span<const double> x);
/// Jacobian DA, row i holds the gradient of A^i.
std::vector<std::vector<double>> jacobian_A(const PotentialSpec& spec, std::span<const double> x);
double divergence_A(const PotentialSpec& spec, std::span<const double> x);
AntisymMatrix eval_B(const PotentialSpec& spec, std::span<const double> x);
/// B_tau = (x/|x|) B.
std::vector<double> trapping_component(const PotentialSpec& spec, std::span<const double> x);
double eval_V(const PotentialSpec& spec, std::span<const double> x);
/// dV/dr = grad V . x/|x|; zero at the origin.
double radial_derivative_V(const PotentialSpec& spec, std::span<const double> x);

// Grid samplers; these accept every family. The weighted forms |x| B_tau =
// x^t B and |x| dV/dr = x . grad V are what the virial identities use and are
// well defined at the origin.
VectorField sample_A(const PotentialSpec& spec, const Grid& grid);
RealField sample_V(const PotentialSpec& spec, const Grid& grid);
VectorField sample_weighted_trapping(const PotentialSpec& spec, const Grid& grid);
RealField sample_weighted_radial_dV(const PotentialSpec& spec, const Grid& grid);
/// B at every grid point, row-major n*n entries per point.
std::vector<double> sample_B(const PotentialSpec& spec, const Grid& grid);

/// Sup over the grid of |div A|. Analytic for built-in families; centered
/// differences on interior points for custom samples. Singular points of
/// unregularized families are skipped.
double check_coulomb_gauge(const PotentialSpec& spec, const Grid& grid);

/// sup_x h^n sum_{0 < |x-y| <= r} |V(y)| / |x-y|^(n-2) over the periodic
/// lattice (minimum-image distances). Requires n >= 3 and 0 < r <= R.
double kato_norm(const RealField& V, double radius);
double kato_norm(const PotentialSpec& spec, const Grid& grid, double radius);
/// pi^(n/2) / Gamma(n/2 - 1).
double kato_threshold(int n);

/// Shell-wise sup of |f| over shells of width h, summed times h.
double radial_tangential_norm(const RealField& f);

/// (2/3)(n-1)(n-3).
double strichartz_high_dim_threshold(int n);
/// (M + 1/2)^2 / M.
double strichartz_n3_coefficient(double m);

struct HypothesisParams {
  double strichartz_m = 1.0;
  /// Kato radius; <= 0 selects R/4.
  double kato_radius = 0.0;
};

struct InequalityCheck {
  std::string name;
  std::string relation;  // "<", "<=", ">="
  bool applicable = false;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct AssumptionReport {
  int dim = 0;
  double kato_radius = 0.0;
  std::optional<double> kato_norm_V_minus;
  std::optional<double> kato_threshold;
  double sup_x2_trapping = 0.0;         // || |x|^2 B_tau ||_inf
  double sup_x32_trapping = 0.0;        // || |x|^{3/2} B_tau ||_inf
  double rt_x3_trapping = 0.0;          // || |x|^3 B_tau ||_{L1_r Linf(S_r)}
  double rt_x3_field = 0.0;             // || |x|^3 B ||_{L1_r Linf(S_r)}, literal full-B variant
  double sup_x3_radial_dV_plus = 0.0;   // || |x|^3 (dV/dr)_+ ||_inf
  double rt_x2_radial_dV_plus = 0.0;    // || |x|^2 (dV/dr)_+ ||_{L1_r Linf(S_r)}
  double coulomb_residual = 0.0;
  double condition_i_min = 0.0;         // min over grid of V + r V_r / 2
  double V_min = 0.0;
  std::vector<InequalityCheck> checks;

  const InequalityCheck& check(const std::string& name) const;
  bool all_smallness_pass() const;
};

AssumptionReport hypothesis_report(const PotentialSpec& spec, const Grid& grid,
                                   const HypothesisParams& params = {});

}  // namespace magvirial
