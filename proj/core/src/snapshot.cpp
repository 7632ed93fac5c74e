#include "kirchbif/snapshot.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kirchbif/errors.hpp"

namespace kirchbif {

Snapshot::Snapshot(const Snapshot& other)
    : params(other.params), space(other.space), field(other.field) {
  field.space = &space;
}

Snapshot& Snapshot::operator=(const Snapshot& other) {
  if (this != &other) {
    params = other.params;
    space = other.space;
    field = other.field;
    field.space = &space;
  }
  return *this;
}

Snapshot::Snapshot(Snapshot&& other) noexcept
    : params(other.params), space(other.space), field(std::move(other.field)) {
  field.space = &space;
}

Snapshot& Snapshot::operator=(Snapshot&& other) noexcept {
  if (this != &other) {
    params = other.params;
    space = other.space;
    field = std::move(other.field);
    field.space = &space;
  }
  return *this;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_snapshot(std::ostream& os, const ProblemParams& params,
                    const DiscreteField& field) {
  const SpaceConfig& cfg = field.space->config();
  os << cfg.dim;
  for (int ax = 0; ax < cfg.dim; ++ax) os << ' ' << cfg.n[ax];
  for (int ax = 0; ax < cfg.dim; ++ax) os << ' ' << format_double(cfg.extent[ax]);
  os << ' ' << format_double(params.a) << ' ' << format_double(params.gamma) << ' '
     << format_double(params.lambda) << '\n';
  for (double v : field.values) os << format_double(v) << '\n';
}

void write_snapshot_file(const std::string& path, const ProblemParams& params,
                         const DiscreteField& field) {
  std::ofstream os(path);
  if (!os) throw SnapshotError("cannot open snapshot for writing: " + path);
  write_snapshot(os, params, field);
  if (!os) throw SnapshotError("write failure on snapshot: " + path);
}

Snapshot read_snapshot(std::istream& is) {
  Snapshot snap;
  std::string header;
  if (!std::getline(is, header)) throw SnapshotError("empty snapshot");
  std::istringstream hs(header);
  SpaceConfig cfg;
  if (!(hs >> cfg.dim)) throw SnapshotError("snapshot header: missing dim");
  if (cfg.dim != 1 && cfg.dim != 2) throw SnapshotError("snapshot header: dim must be 1 or 2");
  for (int ax = 0; ax < cfg.dim; ++ax)
    if (!(hs >> cfg.n[ax])) throw SnapshotError("snapshot header: missing node count");
  for (int ax = 0; ax < cfg.dim; ++ax)
    if (!(hs >> cfg.extent[ax])) throw SnapshotError("snapshot header: missing extent");
  if (!(hs >> snap.params.a >> snap.params.gamma >> snap.params.lambda))
    throw SnapshotError("snapshot header: missing a gamma lambda");
  std::string trailing;
  if (hs >> trailing) throw SnapshotError("snapshot header: unexpected trailing token");
  snap.params.validate();

  snap.space = build_space(cfg);
  snap.field = zero_field(snap.space);
  for (std::size_t i = 0; i < snap.space.size(); ++i) {
    std::string line;
    if (!std::getline(is, line)) {
      std::ostringstream msg;
      msg << "snapshot truncated: expected " << snap.space.size() << " values, got " << i;
      throw SnapshotError(msg.str());
    }
    std::size_t pos = 0;
    try {
      snap.field.values[i] = std::stod(line, &pos);
    } catch (const std::exception&) {
      throw SnapshotError("snapshot value is not a number: '" + line + "'");
    }
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\r')) ++pos;
    if (pos != line.size())
      throw SnapshotError("snapshot value has trailing garbage: '" + line + "'");
  }
  return snap;
}

Snapshot read_snapshot_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw SnapshotError("cannot open snapshot: " + path);
  return read_snapshot(is);
}

} // namespace kirchbif
