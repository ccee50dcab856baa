#ifndef FLEXKRYLOV_PROBLEM_IO_HPP
#define FLEXKRYLOV_PROBLEM_IO_HPP

#include "flexkrylov/problems.hpp"

#include <filesystem>
#include <string>

namespace flexkrylov {

/// Writes `<stem>.f64` (little-endian doubles) and `<stem>.json` with
/// {"shape": [...], "role": role, "dtype": "float64", "endian": "little"}.
void write_vector(const std::filesystem::path& dir, const std::string& stem, const Vector& v,
                  const std::string& role, Index rows = 0, Index cols = 0);
Vector read_vector(const std::filesystem::path& dir, const std::string& stem);

/// problem.json (generator spec, operator dimensions, noise generator, and
/// tomography offsets when relevant) plus x_true, b_true, e and b vectors.
void save_problem(const std::filesystem::path& dir, const TestProblem& p, const ProblemSpec& spec);

/// Regenerates the operator from the stored spec and reads the vectors back.
TestProblem load_problem(const std::filesystem::path& dir);

/// JSON text <-> ProblemSpec, used for configs and problem.json.
ProblemSpec parse_problem_spec(const std::string& json_text);
std::string problem_spec_json(const ProblemSpec& spec);

}  // namespace flexkrylov

#endif  // FLEXKRYLOV_PROBLEM_IO_HPP
