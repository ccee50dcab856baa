#ifndef FLEXKRYLOV_PROBLEMS_HPP
#define FLEXKRYLOV_PROBLEMS_HPP

#include "flexkrylov/linop.hpp"
#include "flexkrylov/transforms.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace flexkrylov {

/// A generated inverse problem b = A x_true + e.
struct TestProblem {
  std::string name;
  OperatorPtr a;
  Vector x_true;
  Vector b_true;
  Vector e;
  Vector b;
  double noise_level = 0.0;
  /// Sparsifying transform of x, when the problem has one.
  TransformPtr psi;
  /// Image shape for 2D problems; image_rows == 0 for 1D signals.
  Index image_rows = 0;
  Index image_cols = 0;
};

enum class PsfKind { gaussian, disk };

struct Psf {
  PsfKind kind = PsfKind::disk;
  /// sigma for gaussian, radius for disk.
  double param = 4.0;  ///< 0 gives a delta
};

/// Square PSF array (odd side, center at the middle), normalized to sum 1.
/// The gaussian is truncated at ceil(3 sigma); a disk of radius r keeps the
/// offsets with k^2 + l^2 <= r^2.
Matrix make_psf(const Psf& psf);

/// 2D correlation with a centered PSF under half-sample symmetric (reflexive)
/// boundary conditions, on row-major images.
class ReflexiveBlurOperator final : public LinearOperator {
 public:
  ReflexiveBlurOperator(Index rows, Index cols, Matrix psf);
  const Matrix& psf() const noexcept { return psf_; }
  std::string describe() const override;

 protected:
  void do_apply(const Vector& x, Vector& y) const override;
  void do_apply_adjoint(const Vector& y, Vector& x) const override;

 private:
  Index img_rows_;
  Index img_cols_;
  Matrix psf_;
};

/// Parallel-beam geometry on an n x n grid of unit pixels centered at the
/// origin. Ray (angle theta, offset s) is the line through s (cos, sin)
/// with direction (-sin, cos); offsets are equispaced over the detector.
struct TomoGeometry {
  int n_grid = 64;
  std::vector<double> angles_deg;
  int rays_per_angle = 0;        ///< 0 means round(sqrt(2) n_grid)
  double detector_width = 0.0;   ///< 0 means sqrt(2) n_grid

  int resolved_rays() const;
  double resolved_width() const;
  std::vector<double> offsets() const;
  void validate() const;
};

/// start:step:stop in degrees, inclusive of stop when it lands on the grid.
std::vector<double> angle_range(double start, double step, double stop);

/// Exact ray/pixel intersection lengths. Rows are ordered angle-major; rays
/// that miss the grid give empty rows. Pixels are row-major with row 0 at the
/// top (largest y).
CsrMatrix assemble_tomography(const TomoGeometry& g);

Vector heat_true_solution(Index n);
/// n x n lower-triangular Toeplitz discretization of the inverse heat kernel
/// (kappa = 1) by the midpoint rule.
OperatorPtr heat_operator(Index n);

/// Symmetric banded Toeplitz blur: entries exp(-d^2 / (2 variance)) for
/// |d| <= band - 1, scaled so the kernel sums to one. variance 0 is the
/// identity.
Matrix blur1d_matrix(Index n, double variance, int band);

/// 64-style piecewise-constant test signal whose 1-level Haar transform has
/// exactly 8 nonzero coefficients (needs n >= 56 and even).
Vector blur1d_true_signal(Index n);

/// Ten-ellipse modified Shepp-Logan phantom, pixel-center sampled, values in
/// [0, 1].
Vector shepp_logan(Index side);
/// Piecewise-constant rectangles; sparse in the Haar basis.
Vector blocks_image(Index side);
/// A few bright point sources and a small cross on a dark background.
Vector stars_image(Index side, std::uint64_t seed);

TestProblem gen_heat(Index n);
TestProblem gen_blur1d(Index n, double variance, int band);
/// image is shepp_logan, blocks or stars; image_seed only affects stars.
TestProblem gen_deblur2d(Index side, const Psf& psf, const std::string& image = "shepp_logan",
                         std::uint64_t image_seed = 7);
TestProblem gen_tomo(const TomoGeometry& g, const std::string& phantom = "shepp_logan",
                     std::uint64_t image_seed = 7);

/// e = level ||b_true|| g / ||g|| with g standard normal from
/// mt19937_64(seed) through Box-Muller; b = b_true + e.
TestProblem add_noise(TestProblem p, double level, std::uint64_t seed);

/// Name of the noise generator, recorded alongside outputs.
inline constexpr const char* kNoiseRng = "mt19937_64+box_muller";

/// Everything needed to regenerate a problem deterministically.
struct ProblemSpec {
  std::string generator = "heat";  ///< heat | blur1d | deblur2d | tomo
  Index n = 64;                    ///< size, image side or grid size
  double variance = 2.25;          ///< blur1d
  int band = 5;                    ///< blur1d
  Psf psf;                         ///< deblur2d
  std::string image = "shepp_logan";  ///< deblur2d / tomo phantom
  std::vector<double> angles_deg;  ///< tomo; empty means 0:2:179
  int rays_per_angle = 0;
  double detector_width = 0.0;
  double noise_level = 0.0;
  std::uint64_t seed = 0;
  std::string transform = "none";  ///< none | haar
  int transform_levels = 1;
  std::uint64_t image_seed = 7;    ///< stars image

  void validate() const;
};

/// Builds the problem, attaches the transform and adds noise.
TestProblem generate(const ProblemSpec& spec);

const std::vector<std::string>& problem_generators();

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_PROBLEMS_HPP
