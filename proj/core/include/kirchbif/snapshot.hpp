#ifndef KIRCHBIF_SNAPSHOT_HPP
#define KIRCHBIF_SNAPSHOT_HPP

#include <iosfwd>
#include <string>

#include "kirchbif/fiber.hpp"
#include "kirchbif/space.hpp"

namespace kirchbif {

/// A field snapshot: the problem triple it was computed for, the mesh, and the
/// node coefficients. Owns its space so it can be loaded standalone.
struct Snapshot {
  ProblemParams params;
  DiscreteSpace space;
  DiscreteField field; ///< field.space points at this->space

  Snapshot() = default;
  Snapshot(const Snapshot& other);
  Snapshot& operator=(const Snapshot& other);
  Snapshot(Snapshot&& other) noexcept;
  Snapshot& operator=(Snapshot&& other) noexcept;
};

/// Text format, bit-exact round trip:
/// line 1: dim n... extent... a gamma lambda (dim-many n and extent entries),
/// then one node value per line in row-major order. Doubles are written with
/// 17 significant digits.
void write_snapshot(std::ostream& os, const ProblemParams& params,
                    const DiscreteField& field);
void write_snapshot_file(const std::string& path, const ProblemParams& params,
                         const DiscreteField& field);

Snapshot read_snapshot(std::istream& is);
Snapshot read_snapshot_file(const std::string& path);

/// Shortest-exact formatting helper shared by snapshot, CSV and config output.
std::string format_double(double v);

} // namespace kirchbif

#endif
