#include "mdoe/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "mdoe/error.hpp"

namespace mdoe {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

bool parse_double(std::string_view field, double& out) {
  while (!field.empty() && (field.front() == ' ' || field.front() == '\t')) field.remove_prefix(1);
  while (!field.empty() && (field.back() == ' ' || field.back() == '\t' || field.back() == '\r')) field.remove_suffix(1);
  if (field.empty()) return false;
  const std::string buf(field);
  char* end = nullptr;
  out = std::strtod(buf.c_str(), &end);
  return end == buf.c_str() + buf.size() && std::isfinite(out);
}

}  // namespace

ManifoldKind parse_manifold_kind(std::string_view name) {
  if (name == "torus") return ManifoldKind::Torus;
  if (name == "mobius") return ManifoldKind::MobiusStrip;
  if (name == "klein8") return ManifoldKind::KleinFigure8;
  if (name == "klein-bottle") return ManifoldKind::KleinBottle;
  throw Error(ErrorCode::InvalidArgument,
              "unknown manifold '" + std::string(name) + "' (torus|mobius|klein8|klein-bottle)");
}

std::string_view to_string(ManifoldKind kind) noexcept {
  switch (kind) {
    case ManifoldKind::Torus: return "torus";
    case ManifoldKind::MobiusStrip: return "mobius";
    case ManifoldKind::KleinFigure8: return "klein8";
    case ManifoldKind::KleinBottle: return "klein-bottle";
  }
  return "torus";
}

GridLayout parse_layout(std::string_view name) {
  if (name == "grid") return GridLayout::Grid;
  if (name == "random") return GridLayout::Random;
  throw Error(ErrorCode::InvalidArgument, "unknown layout '" + std::string(name) + "' (grid|random)");
}

std::string_view to_string(GridLayout layout) noexcept { return layout == GridLayout::Grid ? "grid" : "random"; }

double default_noise_variance(ManifoldKind kind) noexcept {
  switch (kind) {
    case ManifoldKind::Torus: return 0.03;
    case ManifoldKind::MobiusStrip: return 0.05;
    case ManifoldKind::KleinFigure8: return 0.2;
    case ManifoldKind::KleinBottle: return 0.06;
  }
  return 0.0;
}

double response(double u, double v) {
  const double su = std::sin(u);
  const double cv = std::cos(v);
  return su + su * su + cv * cv;
}

Eigen::Vector3d manifold_point(ManifoldKind kind, double u, double v) {
  using std::cos;
  using std::sin;
  switch (kind) {
    case ManifoldKind::Torus: {
      // Major radius 2, minor radius 1.
      constexpr double R = 2.0;
      constexpr double r = 1.0;
      return {(R + r * cos(v)) * cos(u), (R + r * cos(v)) * sin(u), r * sin(v)};
    }
    case ManifoldKind::MobiusStrip: {
      // Half-width coordinate w = v / pi - 1 in [-1, 1).
      const double w = v / std::numbers::pi - 1.0;
      const double radial = 1.0 + 0.5 * w * cos(0.5 * u);
      return {radial * cos(u), radial * sin(u), 0.5 * w * sin(0.5 * u)};
    }
    case ManifoldKind::KleinFigure8: {
      // Figure-8 immersion with tube radius 3:
      //   x = (3 + cos(u/2) sin v - sin(u/2) sin 2v) cos u
      //   y = (3 + cos(u/2) sin v - sin(u/2) sin 2v) sin u
      //   z = sin(u/2) sin v + cos(u/2) sin 2v
      constexpr double r = 3.0;
      const double h = r + cos(0.5 * u) * sin(v) - sin(0.5 * u) * sin(2.0 * v);
      return {h * cos(u), h * sin(u), sin(0.5 * u) * sin(v) + cos(0.5 * u) * sin(2.0 * v)};
    }
    case ManifoldKind::KleinBottle: {
      // Classic "bottle" immersion; its first parameter runs over [0, pi),
      // so s = u / 2.
      const double s = 0.5 * u;
      const double cs = cos(s);
      const double ss = sin(s);
      const double cv = cos(v);
      const double c2 = cs * cs;
      const double c3 = c2 * cs;
      const double c4 = c2 * c2;
      const double c5 = c4 * cs;
      const double c6 = c4 * c2;
      const double c7 = c6 * cs;
      const double x = -2.0 / 15.0 * cs *
                       (3.0 * cv - 30.0 * ss + 90.0 * c4 * ss - 60.0 * c6 * ss + 5.0 * cs * cv * ss);
      const double y = -1.0 / 15.0 * ss *
                       (3.0 * cv - 3.0 * c2 * cv - 48.0 * c4 * cv + 48.0 * c6 * cv - 60.0 * ss +
                        5.0 * cs * cv * ss - 5.0 * c3 * cv * ss - 80.0 * c5 * cv * ss + 80.0 * c7 * cv * ss);
      const double z = 2.0 / 15.0 * (3.0 + 5.0 * cs * ss) * sin(v);
      return {x, y, z};
    }
  }
  return Eigen::Vector3d::Zero();
}

ManifoldDataset generate(const GenerateOptions& options) {
  if (options.n <= 0) throw Error(ErrorCode::InvalidArgument, "n must be positive");
  if (!(options.noise_variance >= 0.0)) throw Error(ErrorCode::InvalidArgument, "noise variance must be >= 0");

  std::mt19937_64 rng(options.seed);
  const Eigen::Index n = options.n;
  Matrix params(n, 2);
  if (options.layout == GridLayout::Grid) {
    const auto side = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(n))));
    if (side * side != n) {
      throw Error(ErrorCode::NotPerfectSquare,
                  "grid layout needs n to be a perfect square (got n=" + std::to_string(n) + ")");
    }
    for (Eigen::Index a = 0; a < side; ++a) {
      for (Eigen::Index b = 0; b < side; ++b) {
        params(a * side + b, 0) = kTwoPi * static_cast<double>(a) / static_cast<double>(side);
        params(a * side + b, 1) = kTwoPi * static_cast<double>(b) / static_cast<double>(side);
      }
    }
  } else {
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    for (Eigen::Index i = 0; i < n; ++i) {
      params(i, 0) = angle(rng);
      params(i, 1) = angle(rng);
    }
  }

  ManifoldDataset data;
  data.kind = options.kind;
  data.noise_sd = std::sqrt(options.noise_variance);
  data.params = params;
  data.points.resize(n, 3);
  data.labels.resize(n);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = params(i, 0);
    const double v = params(i, 1);
    Eigen::Vector3d x = manifold_point(options.kind, u, v);
    if (data.noise_sd > 0.0) {
      for (int k = 0; k < 3; ++k) x[k] += data.noise_sd * noise(rng);
    }
    data.points.row(i) = x.transpose();
    data.labels[i] = response(u, v);
  }
  return data;
}

void write_manifold_csv(std::ostream& out, const ManifoldDataset& data, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "# manifold = " << to_string(data.kind) << '\n';
  out << "# noise_sd = " << std::setprecision(17) << data.noise_sd << '\n';
  out << "x1,x2,x3,u,v,y\n";
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    out << data.points(i, 0) << ',' << data.points(i, 1) << ',' << data.points(i, 2) << ',' << data.params(i, 0)
        << ',' << data.params(i, 1) << ',' << data.labels[i] << '\n';
  }
}

ManifoldDataset read_manifold_csv(std::istream& in) {
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::size_t width = 0;
  std::vector<std::vector<double>> rows;
  ManifoldDataset data;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string_view body = std::string_view(line).substr(1);
      if (const auto pos = body.find("manifold = "); pos != std::string_view::npos) {
        try {
          data.kind = parse_manifold_kind(body.substr(pos + 11));
        } catch (const Error&) {
        }
      } else if (const auto pos2 = body.find("noise_sd = "); pos2 != std::string_view::npos) {
        double sd = 0.0;
        if (parse_double(body.substr(pos2 + 11), sd)) data.noise_sd = sd;
      }
      continue;
    }
    const auto fields = split_commas(line);
    if (!header_seen) {
      if (fields.size() < 4 || fields[fields.size() - 3] != "u" || fields[fields.size() - 2] != "v" ||
          fields.back() != "y") {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected header x1..xd,u,v,y");
      }
      width = fields.size();
      header_seen = true;
      continue;
    }
    if (fields.size() != width) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected " + std::to_string(width) +
                                             " fields, got " + std::to_string(fields.size()));
    }
    std::vector<double> row(width);
    for (std::size_t k = 0; k < width; ++k) {
      if (!parse_double(fields[k], row[k])) {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number '" +
                                               std::string(fields[k]) + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!header_seen || rows.empty()) throw Error(ErrorCode::ParseError, "manifold CSV has no data rows");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(width - 3);
  data.points.resize(n, d);
  data.params.resize(n, 2);
  data.labels.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& r = rows[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < d; ++k) data.points(i, k) = r[static_cast<std::size_t>(k)];
    data.params(i, 0) = r[width - 3];
    data.params(i, 1) = r[width - 2];
    data.labels[i] = r[width - 1];
  }
  return data;
}

ManifoldDataset load_manifold_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return read_manifold_csv(in);
}

ImageDataset parse_images(std::istream& in, std::string object_id) {
  constexpr std::size_t kFields = static_cast<std::size_t>(kImagePixels) + 1;
  std::string line;
  int line_no = 0;
  std::vector<std::vector<double>> rows;
  std::vector<double> angles;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("p0", 0) == 0) continue;
    const auto fields = split_commas(line);
    if (fields.size() != kFields) {
      throw Error(ErrorCode::ParseError, "row at line " + std::to_string(line_no) + " has " +
                                             std::to_string(fields.size()) + " fields, expected 1025");
    }
    std::vector<double> px(kFields - 1);
    for (std::size_t k = 0; k + 1 < kFields; ++k) {
      if (!parse_double(fields[k], px[k])) {
        throw Error(ErrorCode::ParseError, "row at line " + std::to_string(line_no) + ": bad pixel value");
      }
      if (px[k] < -1e-9 || px[k] > 1.0 + 1e-9) {
        throw Error(ErrorCode::ParseError,
                    "row at line " + std::to_string(line_no) + ": pixel " + std::to_string(k) + " outside [0, 1]");
      }
      px[k] = std::clamp(px[k], 0.0, 1.0);
    }
    double angle = 0.0;
    if (!parse_double(fields.back(), angle)) {
      throw Error(ErrorCode::ParseError, "row at line " + std::to_string(line_no) + ": bad angle");
    }
    if (angle < 0.0 || angle >= 360.0) {
      throw Error(ErrorCode::AngleOutOfRange,
                  "row at line " + std::to_string(line_no) + ": angle " + std::to_string(angle) + " not in [0, 360)");
    }
    rows.push_back(std::move(px));
    angles.push_back(angle);
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "image file has no data rows");

  std::vector<std::size_t> order(rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return angles[a] < angles[b]; });

  ImageDataset data;
  data.object_id = std::move(object_id);
  data.vectors.resize(static_cast<Eigen::Index>(rows.size()), kImagePixels);
  data.angles.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto& px = rows[order[r]];
    for (Eigen::Index k = 0; k < kImagePixels; ++k) data.vectors(static_cast<Eigen::Index>(r), k) = px[static_cast<std::size_t>(k)];
    data.angles[static_cast<Eigen::Index>(r)] = angles[order[r]];
  }
  return data;
}

ImageDataset load_images(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_images(in, path.stem().string());
}

void write_images(std::ostream& out, const ImageDataset& data, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << std::setprecision(9);
  for (Eigen::Index i = 0; i < data.size(); ++i) {
    for (Eigen::Index k = 0; k < kImagePixels; ++k) out << data.vectors(i, k) << ',';
    out << data.angles[i] << '\n';
  }
}

ImageDataset rotating_pattern_images(int count, double step_degrees, std::uint64_t seed) {
  if (count <= 0) throw Error(ErrorCode::InvalidArgument, "image count must be positive");
  if (!(step_degrees > 0.0) || step_degrees * (count - 1) >= 360.0) {
    throw Error(ErrorCode::AngleOutOfRange, "poses must fit in [0, 360)");
  }
  struct Blob {
    double radius, theta, width, amplitude;
  };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius(4.0, 12.0);
  std::uniform_real_distribution<double> theta(0.0, kTwoPi);
  std::uniform_real_distribution<double> width(1.5, 3.0);
  std::uniform_real_distribution<double> amplitude(0.5, 1.0);
  std::vector<Blob> blobs(4);
  for (auto& b : blobs) b = {radius(rng), theta(rng), width(rng), amplitude(rng)};

  const double centre = 0.5 * static_cast<double>(kImageSide - 1);
  ImageDataset data;
  data.object_id = "rotating-pattern-" + std::to_string(seed);
  data.vectors.resize(count, kImagePixels);
  data.angles.resize(count);
  for (int i = 0; i < count; ++i) {
    const double deg = step_degrees * i;
    const double rot = deg * std::numbers::pi / 180.0;
    data.angles[i] = deg;
    for (Eigen::Index row = 0; row < kImageSide; ++row) {
      for (Eigen::Index col = 0; col < kImageSide; ++col) {
        double value = 0.0;
        for (const auto& b : blobs) {
          const double bx = centre + b.radius * std::cos(b.theta + rot);
          const double by = centre + b.radius * std::sin(b.theta + rot);
          const double dx = static_cast<double>(col) - bx;
          const double dy = static_cast<double>(row) - by;
          value += b.amplitude * std::exp(-(dx * dx + dy * dy) / (2.0 * b.width * b.width));
        }
        data.vectors(i, row * kImageSide + col) = std::min(1.0, value);
      }
    }
  }
  return data;
}

}  // namespace mdoe
