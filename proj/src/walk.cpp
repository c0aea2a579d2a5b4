#include "cwl/walk.hpp"

#include "cwl/rng.hpp"

#include <charconv>
#include <sstream>
#include <stdexcept>

namespace cwl {

void step(WalkState& state, const CookieEnvironment& env, double u) {
  const auto it = state.visits.find(state.position);
  const std::uint32_t occupied = it == state.visits.end() ? 1u : it->second;
  const std::uint32_t prior = occupied - 1;
  int jump;
  if (prior < static_cast<std::uint32_t>(env.cookies_per_vertex())) {
    jump = env.law(static_cast<int>(prior) + 1).sample(u);
  } else {
    jump = u < 0.5 ? +1 : -1;
  }
  state.position += jump;
  ++state.time;
  ++state.visits[state.position];
  if (state.position > state.running_max) {
    state.running_max = state.position;
  }
  if (state.position < state.running_min) {
    state.running_min = state.position;
  }
}

Trajectory simulate(const CookieEnvironment& env, u64 seed, i64 horizon, u64 stream) {
  if (horizon < 0) {
    throw std::invalid_argument("simulate: horizon must be >= 0");
  }
  const bool skip_free = env.law(1).skip_free_left();
  UniformSource uniforms(seed, stream);
  WalkState state;
  state.visits.reserve(static_cast<std::size_t>(horizon / 2 + 16));
  Trajectory traj;
  traj.seed = seed;
  traj.stream = stream;
  traj.env_hash = env.hash();
  traj.positions.reserve(static_cast<std::size_t>(horizon) + 1);
  traj.positions.push_back(0);
  for (i64 t = 0; t < horizon; ++t) {
    const i64 from = state.position;
    step(state, env, uniforms.next());
    traj.positions.push_back(state.position);
    if (skip_free && state.position > from + 1 &&
        state.visits[state.position] > 1) {
      // Forward jump landing on a revisit: everything in between must have
      // been visited already, otherwise the sampler is broken.
      for (i64 v = from; v < state.position; ++v) {
        if (!state.visits.count(v)) {
          throw std::logic_error("simulate: forward jump skipped over unvisited vertices");
        }
      }
    }
  }
  return traj;
}

std::set<i64> range_at(const Trajectory& traj, i64 t) {
  if (t < 0 || t > traj.horizon()) {
    throw std::out_of_range("range_at: time outside trajectory");
  }
  std::set<i64> range;
  for (i64 s = 0; s <= t; ++s) {
    range.insert(traj.positions[static_cast<std::size_t>(s)]);
  }
  return range;
}

std::string serialize(const Trajectory& traj) {
  std::ostringstream out;
  out << "# cookie-walk-lab trajectory v1\n";
  out << "seed " << traj.seed << "\n";
  out << "stream " << traj.stream << "\n";
  out << "env " << std::hex << traj.env_hash << std::dec << "\n";
  out << "horizon " << traj.horizon() << "\n";
  out << "deltas";
  for (std::size_t t = 1; t < traj.positions.size(); ++t) {
    out << ' ' << (traj.positions[t] - traj.positions[t - 1]);
  }
  out << "\n";
  return out.str();
}

Trajectory deserialize(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "# cookie-walk-lab trajectory v1") {
    throw std::invalid_argument("trajectory record: bad header");
  }
  Trajectory traj;
  std::string key;
  in >> key >> traj.seed;
  if (key != "seed") throw std::invalid_argument("trajectory record: missing seed");
  in >> key >> traj.stream;
  if (key != "stream") throw std::invalid_argument("trajectory record: missing stream");
  in >> key >> std::hex >> traj.env_hash >> std::dec;
  if (key != "env") throw std::invalid_argument("trajectory record: missing env hash");
  i64 horizon = 0;
  in >> key >> horizon;
  if (key != "horizon" || horizon < 0) {
    throw std::invalid_argument("trajectory record: missing horizon");
  }
  in >> key;
  if (key != "deltas") throw std::invalid_argument("trajectory record: missing deltas");
  traj.positions.reserve(static_cast<std::size_t>(horizon) + 1);
  traj.positions.push_back(0);
  i64 pos = 0;
  for (i64 t = 0; t < horizon; ++t) {
    i64 d = 0;
    if (!(in >> d)) {
      throw std::invalid_argument("trajectory record: truncated deltas");
    }
    pos += d;
    traj.positions.push_back(pos);
  }
  return traj;
}

} // namespace cwl
