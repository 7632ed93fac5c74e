#ifndef KIRCHBIF_ERRORS_HPP
#define KIRCHBIF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace kirchbif {

/// Invalid problem or space configuration (bad a, gamma, tolerances, mesh, ...).
class ConfigError : public std::invalid_argument {
public:
  explicit ConfigError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Malformed or unreadable snapshot file.
class SnapshotError : public std::runtime_error {
public:
  explicit SnapshotError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A root finder could not certify a sign change on its bracket.
class BracketError : public std::runtime_error {
public:
  explicit BracketError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An iterative solver hit its iteration cap before reaching tolerance.
class ConvergenceError : public std::runtime_error {
public:
  explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Requested ray projection does not exist (fiber map is Monotone or Degenerate).
class ProjectionInfeasible : public std::runtime_error {
public:
  explicit ProjectionInfeasible(const std::string& msg) : std::runtime_error(msg) {}
};

/// Descent made no acceptable progress before reaching tolerance.
class DescentStall : public std::runtime_error {
public:
  explicit DescentStall(const std::string& msg) : std::runtime_error(msg) {}
};

/// No admissible starting point found for a constrained descent.
class InfeasibleStart : public std::runtime_error {
public:
  explicit InfeasibleStart(const std::string& msg) : std::runtime_error(msg) {}
};

/// Saddle search geometry precondition violated (endpoint energy vs. ring level).
class GeometryViolation : public std::runtime_error {
public:
  explicit GeometryViolation(const std::string& msg) : std::runtime_error(msg) {}
};

/// Saddle search converged to a point that is not saddle-like.
class SaddleEscape : public std::runtime_error {
public:
  explicit SaddleEscape(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace kirchbif

#endif
