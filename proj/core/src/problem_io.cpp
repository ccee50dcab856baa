#include "flexkrylov/problem_io.hpp"

#include "json_util.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace flexkrylov {

namespace fs = std::filesystem;

namespace detail {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (const auto& item : j.items()) {
    const bool ok = std::any_of(known.begin(), known.end(),
                                [&](const char* k) { return item.key() == k; });
    if (!ok) throw ConfigError(where + ": unknown key '" + item.key() + "'");
  }
}

ProblemSpec problem_spec_from_json(const json& j) {
  const std::string where = "problem";
  if (!j.is_object()) throw ConfigError("problem: expected an object");
  reject_unknown_keys(j,
                      {"generator", "n", "variance", "band", "psf", "image", "angles",
                       "rays_per_angle", "detector_width", "noise_level", "seed", "transform",
                       "transform_levels", "image_seed"},
                      where);
  ProblemSpec s;
  if (!j.contains("generator")) throw ConfigError("problem: missing 'generator'");
  s.generator = get_or<std::string>(j, "generator", s.generator, where);
  s.n = get_or<Index>(j, "n", s.n, where);
  s.variance = get_or<double>(j, "variance", s.variance, where);
  s.band = get_or<int>(j, "band", s.band, where);
  if (j.contains("psf")) {
    const json& p = j.at("psf");
    reject_unknown_keys(p, {"kind", "param"}, "problem.psf");
    const auto kind = get_or<std::string>(p, "kind", "disk", "problem.psf");
    if (kind == "disk") {
      s.psf.kind = PsfKind::disk;
    } else if (kind == "gaussian") {
      s.psf.kind = PsfKind::gaussian;
    } else {
      throw ConfigError("problem.psf.kind must be 'disk' or 'gaussian'");
    }
    s.psf.param = get_or<double>(p, "param", s.psf.param, "problem.psf");
  }
  s.image = get_or<std::string>(j, "image", s.image, where);
  if (j.contains("angles")) {
    const json& a = j.at("angles");
    if (a.is_array()) {
      for (const auto& v : a) {
        if (!v.is_number()) throw ConfigError("problem.angles: expected numbers");
        s.angles_deg.push_back(v.get<double>());
      }
    } else if (a.is_object()) {
      reject_unknown_keys(a, {"start", "step", "stop"}, "problem.angles");
      s.angles_deg = angle_range(get_or<double>(a, "start", 0.0, "problem.angles"),
                                 get_or<double>(a, "step", 2.0, "problem.angles"),
                                 get_or<double>(a, "stop", 179.0, "problem.angles"));
    } else {
      throw ConfigError("problem.angles: expected a list or {start, step, stop}");
    }
  }
  s.rays_per_angle = get_or<int>(j, "rays_per_angle", s.rays_per_angle, where);
  s.detector_width = get_or<double>(j, "detector_width", s.detector_width, where);
  s.noise_level = get_or<double>(j, "noise_level", s.noise_level, where);
  s.seed = get_or<std::uint64_t>(j, "seed", s.seed, where);
  s.transform = get_or<std::string>(j, "transform", s.transform, where);
  s.transform_levels = get_or<int>(j, "transform_levels", s.transform_levels, where);
  s.image_seed = get_or<std::uint64_t>(j, "image_seed", s.image_seed, where);
  s.validate();
  return s;
}

json problem_spec_to_json(const ProblemSpec& s) {
  json j;
  j["generator"] = s.generator;
  j["n"] = s.n;
  if (s.generator == "blur1d") {
    j["variance"] = s.variance;
    j["band"] = s.band;
  }
  if (s.generator == "deblur2d") {
    j["psf"] = {{"kind", s.psf.kind == PsfKind::disk ? "disk" : "gaussian"}, {"param", s.psf.param}};
  }
  if (s.generator == "deblur2d" || s.generator == "tomo") {
    j["image"] = s.image;
    j["image_seed"] = s.image_seed;
  }
  if (s.generator == "tomo") {
    j["angles"] = s.angles_deg;
    j["rays_per_angle"] = s.rays_per_angle;
    j["detector_width"] = s.detector_width;
  }
  j["noise_level"] = s.noise_level;
  j["seed"] = s.seed;
  j["transform"] = s.transform;
  j["transform_levels"] = s.transform_levels;
  return j;
}

}  // namespace detail

namespace {

detail::json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return detail::json::parse(in);
  } catch (const detail::json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

void write_vector(const fs::path& dir, const std::string& stem, const Vector& v,
                  const std::string& role, Index rows, Index cols) {
  std::ofstream out(dir / (stem + ".f64"), std::ios::binary);
  if (!out) throw ConfigError("cannot write " + (dir / (stem + ".f64")).string());
  for (Index i = 0; i < v.size(); ++i) {
    auto bits = std::bit_cast<std::uint64_t>(v[i]);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char buf[8];
    std::memcpy(buf, &bits, 8);
    out.write(buf, 8);
  }
  detail::json meta;
  meta["role"] = role;
  meta["dtype"] = "float64";
  meta["endian"] = "little";
  meta["shape"] = rows > 0 ? detail::json::array({rows, cols}) : detail::json::array({v.size()});
  write_text(dir / (stem + ".json"), meta.dump(2) + "\n");
}

Vector read_vector(const fs::path& dir, const std::string& stem) {
  const detail::json meta = read_json_file(dir / (stem + ".json"));
  Index count = 1;
  try {
    for (const auto& d : meta.at("shape")) count *= d.get<Index>();
  } catch (const detail::json::exception&) {
    throw ConfigError(stem + ".json: malformed shape");
  }
  std::ifstream in(dir / (stem + ".f64"), std::ios::binary);
  if (!in) throw ConfigError("cannot open " + (dir / (stem + ".f64")).string());
  Vector v(count);
  for (Index i = 0; i < count; ++i) {
    char buf[8];
    if (!in.read(buf, 8)) throw ConfigError(stem + ".f64: truncated file");
    std::uint64_t bits;
    std::memcpy(&bits, buf, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    v[i] = std::bit_cast<double>(bits);
  }
  return v;
}

void save_problem(const fs::path& dir, const TestProblem& p, const ProblemSpec& spec) {
  fs::create_directories(dir);
  detail::json j;
  j["schema_version"] = 1;
  j["name"] = p.name;
  j["spec"] = detail::problem_spec_to_json(spec);
  j["operator"] = {{"description", p.a->describe()}, {"rows", p.a->rows()}, {"cols", p.a->cols()}};
  j["noise_level"] = p.noise_level;
  j["noise_rng"] = kNoiseRng;
  if (p.image_rows > 0) j["image_shape"] = {p.image_rows, p.image_cols};
  if (spec.generator == "tomo") {
    TomoGeometry g;
    g.n_grid = static_cast<int>(spec.n);
    g.rays_per_angle = spec.rays_per_angle;
    g.detector_width = spec.detector_width;
    j["tomo_offsets"] = g.offsets();
  }
  write_text(dir / "problem.json", j.dump(2) + "\n");
  write_vector(dir, "x_true", p.x_true, "x_true", p.image_rows, p.image_cols);
  write_vector(dir, "b_true", p.b_true, "b_true");
  write_vector(dir, "e", p.e, "noise");
  write_vector(dir, "b", p.b, "b");
}

TestProblem load_problem(const fs::path& dir) {
  const detail::json j = read_json_file(dir / "problem.json");
  if (!j.contains("spec")) throw ConfigError("problem.json: missing spec");
  ProblemSpec spec = detail::problem_spec_from_json(j.at("spec"));
  // The stored vectors are authoritative; regenerate only the operator.
  spec.noise_level = 0.0;
  TestProblem p = generate(spec);
  p.x_true = read_vector(dir, "x_true");
  p.b_true = read_vector(dir, "b_true");
  p.e = read_vector(dir, "e");
  p.b = read_vector(dir, "b");
  p.noise_level = detail::get_or<double>(j, "noise_level", 0.0, "problem.json");
  if (p.b.size() != p.a->rows() || p.x_true.size() != p.a->cols()) {
    throw ConfigError("problem.json: stored vectors do not match the operator");
  }
  return p;
}

ProblemSpec parse_problem_spec(const std::string& json_text) {
  try {
    return detail::problem_spec_from_json(detail::json::parse(json_text));
  } catch (const detail::json::parse_error& e) {
    throw ConfigError(std::string("problem spec: ") + e.what());
  }
}

std::string problem_spec_json(const ProblemSpec& spec) {
  return detail::problem_spec_to_json(spec).dump(2);
}

}  // namespace flexkrylov
