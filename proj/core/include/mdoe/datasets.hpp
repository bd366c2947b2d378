#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "mdoe/numerics.hpp"

namespace mdoe {

enum class ManifoldKind { Torus, MobiusStrip, KleinFigure8, KleinBottle };
enum class GridLayout { Grid, Random };

ManifoldKind parse_manifold_kind(std::string_view name);  // torus, mobius, klein8, klein-bottle
std::string_view to_string(ManifoldKind kind) noexcept;
GridLayout parse_layout(std::string_view name);           // grid, random
std::string_view to_string(GridLayout layout) noexcept;

/// Per-coordinate noise variance used for each surface's noisy variant.
double default_noise_variance(ManifoldKind kind) noexcept;

/// sin(u) + sin^2(u) + cos^2(v)
double response(double u, double v);

/// Noise-free embedding of parameters (u, v) in [0, 2pi)^2 into R^3.
Eigen::Vector3d manifold_point(ManifoldKind kind, double u, double v);

struct ManifoldDataset {
  Matrix points;  // n x 3 ambient coordinates (noisy when noise_sd > 0)
  Matrix params;  // n x 2, columns u and v
  Vector labels;  // response at the noise-free (u, v)
  ManifoldKind kind = ManifoldKind::Torus;
  double noise_sd = 0.0;

  [[nodiscard]] Eigen::Index size() const noexcept { return points.rows(); }
};

struct GenerateOptions {
  ManifoldKind kind = ManifoldKind::Torus;
  Eigen::Index n = 400;
  double noise_variance = 0.0;
  std::uint64_t seed = 1;
  GridLayout layout = GridLayout::Grid;
};

/// Grid layout needs n to be a perfect square (u, v on a sqrt(n) x sqrt(n)
/// grid); NotPerfectSquare otherwise. Random layout draws (u, v) uniformly.
ManifoldDataset generate(const GenerateOptions& options);

/// CSV with header x1,x2,x3,u,v,y.
void write_manifold_csv(std::ostream& out, const ManifoldDataset& data, const std::vector<std::string>& comments = {});
ManifoldDataset read_manifold_csv(std::istream& in);
ManifoldDataset load_manifold_csv(const std::filesystem::path& path);

inline constexpr Eigen::Index kImageSide = 32;
inline constexpr Eigen::Index kImagePixels = kImageSide * kImageSide;

struct ImageDataset {
  Matrix vectors;  // n x 1024, values in [0, 1]
  Vector angles;   // degrees in [0, 360)
  std::string object_id;

  [[nodiscard]] Eigen::Index size() const noexcept { return vectors.rows(); }
};

/// Image CSV: 1025 comma-separated fields per row (p0..p1023, then the angle
/// in degrees). Lines starting with '#' and a header row starting with "p0"
/// are skipped. Rows come back sorted by angle.
ImageDataset parse_images(std::istream& in, std::string object_id = {});
ImageDataset load_images(const std::filesystem::path& path);
void write_images(std::ostream& out, const ImageDataset& data, const std::vector<std::string>& comments = {});

/// 32 x 32 grayscale renders of a fixed random blob pattern rotated to
/// `count` poses `step_degrees` apart. The seed picks the pattern.
ImageDataset rotating_pattern_images(int count = 72, double step_degrees = 5.0, std::uint64_t seed = 1);

}  // namespace mdoe
