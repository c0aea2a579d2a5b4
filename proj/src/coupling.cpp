#include "cwl/coupling.hpp"

#include "cwl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace cwl {

namespace {

i64 floor_div(i64 a, i64 b) {
  i64 q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) {
    --q;
  }
  return q;
}

} // namespace

MegaVertexConfig::MegaVertexConfig(int c_, int ell_) : c(c_), ell(ell_) {
  if (c < 3 || ell < 3 * c) {
    throw std::invalid_argument("mega vertex config: need c >= 3 and ell >= 3c");
  }
}

std::optional<i64> MegaVertexConfig::block_of(i64 y) const {
  const i64 j = floor_div(y, ell);
  const i64 offset = y - j * static_cast<i64>(ell);
  if (offset < c) {
    return j;
  }
  return std::nullopt;
}

i64 MegaVertexConfig::tile_of(i64 y) const {
  return floor_div(y - c, ell) + 1;
}

const char* to_string(TriggerBranch b) {
  return b == TriggerBranch::cookie ? "cookie" : "no_cookie";
}

const char* to_string(TriggerSubcase s) {
  switch (s) {
    case TriggerSubcase::hit_cookie_at_entry: return "hit_cookie_at_entry";
    case TriggerSubcase::hit_cookie_later: return "hit_cookie_later";
    case TriggerSubcase::exited_left: return "exited_left";
    case TriggerSubcase::exited_without_cookie: return "exited_without_cookie";
    case TriggerSubcase::pending: return "pending";
  }
  return "unknown";
}

int mega_cookie_count(const Trajectory& traj, const MegaVertexConfig& cfg, i64 j, i64 t) {
  if (t < 0 || t > traj.horizon() + 1) {
    throw std::out_of_range("mega_cookie_count: time outside trajectory");
  }
  std::unordered_set<i64> eaten;
  const i64 lo = cfg.block_lo(j);
  const i64 hi = cfg.block_hi(j);
  for (i64 s = 0; s < t; ++s) {
    const i64 y = traj.positions[static_cast<std::size_t>(s)];
    if (y >= lo && y <= hi) {
      eaten.insert(y);
    }
  }
  return cfg.c - static_cast<int>(eaten.size());
}

namespace {

struct BlockMachine {
  enum class Phase : std::uint8_t { idle, await_second, await_third };
  Phase phase = Phase::idle;
  TriggerBranch branch = TriggerBranch::cookie;  // first sequence always has cookies
  i64 k = 1;
  i64 t_enter = -1;
  i64 t_event = -1;
  bool neighbor_has_cookies = false;
  bool fire_on_fresh = false;
  TriggerSubcase subcase = TriggerSubcase::pending;
  i64 win_lo = 0;
  i64 win_hi = 0;
};

struct ScanState {
  const MegaVertexConfig& cfg;
  std::unordered_set<i64> seen;
  std::unordered_map<i64, int> eaten;   // committed through the previous step
  std::unordered_map<i64, BlockMachine> machines;
  std::vector<i64> active;
  TriggerScan out;
  i64 last_fresh_block = 0;
  i64 last_fresh_time = -2;

  explicit ScanState(const MegaVertexConfig& cfg_) : cfg(cfg_) {}

  int cookies_now(i64 j) const {
    const auto it = eaten.find(j);
    return cfg.c - (it == eaten.end() ? 0 : it->second);
  }

  void drop_active(i64 j) {
    active.erase(std::remove(active.begin(), active.end(), j), active.end());
  }

  void resolve(BlockMachine& m, i64 j, i64 t, i64 y) {
    TriggerRecord rec;
    rec.block = j;
    rec.k = m.k;
    rec.t_enter = m.t_enter;
    rec.t_event = m.t_event;
    rec.t_resolve = t;
    rec.branch = m.branch;
    if (m.subcase == TriggerSubcase::pending) {
      rec.subcase = y < m.win_lo ? TriggerSubcase::exited_left
                                 : TriggerSubcase::exited_without_cookie;
    } else {
      rec.subcase = m.subcase;
    }
    if (m.branch == TriggerBranch::cookie) {
      rec.neighbor_has_cookies = m.neighbor_has_cookies;
    }
    i64 threshold;
    if (m.branch == TriggerBranch::no_cookie) {
      threshold = cfg.block_lo(j + 1) + cfg.c - 1;
    } else if (m.neighbor_has_cookies) {
      threshold = cfg.block_lo(j + 1);
    } else {
      threshold = cfg.block_lo(j + 1) + cfg.c - 1;
    }
    rec.arrow = y >= threshold ? std::int8_t{+1} : std::int8_t{-1};
    rec.censored = false;
    out.arrows.append(j, rec.arrow);
    out.records.push_back(rec);
    ++out.completed;

    m.k += 1;
    m.phase = BlockMachine::Phase::idle;
    m.branch = cookies_now(j) > 0 ? TriggerBranch::cookie : TriggerBranch::no_cookie;
    m.t_enter = m.t_event = -1;
    m.subcase = TriggerSubcase::pending;
    m.fire_on_fresh = false;
    drop_active(j);
  }

  // Second trigger fired at time t: fix the neighbour state and the final
  // watch window, then wait for the third trigger.
  void arm_third(BlockMachine& m, i64 j, i64 t) {
    m.t_event = t;
    m.neighbor_has_cookies = cookies_now(j + 1) > 0;
    m.win_lo = cfg.block_lo(j - 1) + cfg.c;
    m.win_hi = m.neighbor_has_cookies ? cfg.block_lo(j + 1) - 1
                                      : cfg.block_lo(j + 1) + cfg.c - 2;
    m.fire_on_fresh = true;
    m.phase = BlockMachine::Phase::await_third;
  }
};

} // namespace

TriggerScan scan_triggers(const Trajectory& traj, const MegaVertexConfig& cfg) {
  ScanState st(cfg);
  st.seen.reserve(traj.positions.size());
  const i64 horizon = traj.horizon();

  for (i64 t = 0; t <= horizon; ++t) {
    const i64 y = traj.positions[static_cast<std::size_t>(t)];
    const bool fresh = !st.seen.count(y);
    const std::optional<i64> jy = cfg.block_of(y);

    bool progressed = true;
    while (progressed) {
      progressed = false;

      const std::vector<i64> snapshot = st.active;
      for (i64 j : snapshot) {
        BlockMachine& m = st.machines.at(j);
        if (m.phase == BlockMachine::Phase::await_second) {
          const bool exited = y < m.win_lo || y > m.win_hi;
          const bool cookie_hit = fresh && jy && *jy == j;
          if (cookie_hit || exited) {
            if (cookie_hit) {
              m.subcase = t == m.t_enter ? TriggerSubcase::hit_cookie_at_entry
                                         : TriggerSubcase::hit_cookie_later;
            }
            st.arm_third(m, j, t);
            progressed = true;
          }
        } else if (m.phase == BlockMachine::Phase::await_third) {
          const bool exited = y < m.win_lo || y > m.win_hi;
          const bool fresh_fired = m.fire_on_fresh && st.last_fresh_time == t - 1 &&
                                   st.last_fresh_block == j && t - 1 >= m.t_event;
          if (fresh_fired && m.subcase == TriggerSubcase::pending) {
            m.subcase = TriggerSubcase::hit_cookie_later;
          }
          if (exited || fresh_fired) {
            st.resolve(m, j, t, y);
            progressed = true;
          }
        }
      }

      if (jy) {
        BlockMachine& m = st.machines[*jy];  // lazy: idle, cookie branch, k = 1
        if (m.phase == BlockMachine::Phase::idle) {
          if (m.branch == TriggerBranch::cookie) {
            m.t_enter = t;
            m.win_lo = cfg.block_lo(*jy - 1) + cfg.c;
            m.win_hi = cfg.block_hi(*jy);
            m.phase = BlockMachine::Phase::await_second;
            st.active.push_back(*jy);
            progressed = true;
          } else if (y == cfg.block_hi(*jy)) {
            // Both leading triggers coincide at the block's top vertex.
            m.t_enter = t;
            m.t_event = t;
            m.win_lo = cfg.block_lo(*jy - 1) + cfg.c;
            m.win_hi = cfg.block_lo(*jy + 1) + cfg.c - 2;
            m.fire_on_fresh = false;
            m.subcase = TriggerSubcase::pending;
            m.phase = BlockMachine::Phase::await_third;
            st.active.push_back(*jy);
            progressed = true;
          }
        }
      }
    }

    if (fresh) {
      st.seen.insert(y);
      if (jy) {
        st.eaten[*jy] += 1;
        st.last_fresh_block = *jy;
        st.last_fresh_time = t;
      }
    }
  }

  for (i64 j : st.active) {
    const BlockMachine& m = st.machines.at(j);
    TriggerRecord rec;
    rec.block = j;
    rec.k = m.k;
    rec.t_enter = m.t_enter;
    rec.t_event = m.t_event;
    rec.t_resolve = -1;
    rec.branch = m.branch;
    rec.subcase = m.subcase;
    if (m.branch == TriggerBranch::cookie && m.phase == BlockMachine::Phase::await_third) {
      rec.neighbor_has_cookies = m.neighbor_has_cookies;
    }
    rec.arrow = 0;
    rec.censored = true;
    st.out.records.push_back(rec);
    ++st.out.censored;
  }

  std::sort(st.out.records.begin(), st.out.records.end(),
            [](const TriggerRecord& a, const TriggerRecord& b) {
              if (a.t_enter != b.t_enter) return a.t_enter < b.t_enter;
              return a.block < b.block;
            });
  return std::move(st.out);
}

std::vector<TriggerRecord> scan_triggers_for_block(const Trajectory& traj,
                                                   const MegaVertexConfig& cfg, i64 j) {
  const TriggerScan scan = scan_triggers(traj, cfg);
  std::vector<TriggerRecord> out;
  for (const auto& rec : scan.records) {
    if (rec.block == j) {
      out.push_back(rec);
    }
  }
  return out;
}

std::int8_t assign_arrow(const TriggerRecord& record, const Trajectory& traj,
                         const MegaVertexConfig& cfg) {
  if (record.censored) {
    throw std::invalid_argument("assign_arrow: record is censored");
  }
  const i64 y = traj.positions[static_cast<std::size_t>(record.t_resolve)];
  i64 threshold;
  if (record.branch == TriggerBranch::no_cookie) {
    threshold = cfg.block_lo(record.block + 1) + cfg.c - 1;
  } else if (record.neighbor_has_cookies.value_or(false)) {
    threshold = cfg.block_lo(record.block + 1);
  } else {
    threshold = cfg.block_lo(record.block + 1) + cfg.c - 1;
  }
  return y >= threshold ? std::int8_t{+1} : std::int8_t{-1};
}

CoupledBundle build_coupled_bundle(const Trajectory& traj, const MegaVertexConfig& cfg) {
  return build_coupled_bundle(traj, cfg, scan_triggers(traj, cfg));
}

CoupledBundle build_coupled_bundle(const Trajectory& traj, const MegaVertexConfig& cfg,
                                   const TriggerScan& scan) {
  CoupledBundle bundle;
  bundle.E = scan.arrows;
  for (const auto& rec : scan.records) {
    if (!rec.censored) {
      bundle.h_times.push_back(rec.t_enter);
      bundle.h_blocks.push_back(rec.block);
    }
  }
  (void)traj;
  (void)cfg;
  if (bundle.h_times.empty()) {
    return bundle;
  }
  bundle.tau.push_back(0);
  bundle.j_seq.push_back(bundle.h_blocks.front());
  bundle.sigma_cum.push_back(0);
  for (std::size_t n = 1; n < bundle.h_blocks.size(); ++n) {
    const i64 prev = bundle.j_seq.back();
    const i64 cur = bundle.h_blocks[n];
    if (cur == prev) {
      continue;
    }
    if (cur > prev) {
      bundle.H.append(prev, +1);
      for (i64 i = prev; i < cur; ++i) {
        bundle.K.append(i, +1);
      }
    } else {
      if (cur != prev - 1) {
        ++bundle.backward_skip_violations;
      }
      bundle.H.append(prev, -1);
      for (i64 i = prev; i > cur; --i) {
        bundle.K.append(i, -1);
      }
    }
    bundle.tau.push_back(n);
    bundle.j_seq.push_back(cur);
    bundle.sigma_cum.push_back(bundle.sigma_cum.back() + std::llabs(cur - prev));
  }
  return bundle;
}

SandwichReport sandwich_check(const CoupledBundle& bundle, const Trajectory& traj,
                              const MegaVertexConfig& cfg) {
  SandwichReport report;
  if (bundle.j_seq.empty()) {
    return report;
  }
  const i64 total = bundle.sigma_cum.back();
  const std::vector<i64> replay = walk_from_arrows(bundle.K, total);
  for (std::size_t n = 0; n < bundle.j_seq.size(); ++n) {
    const i64 x = replay[static_cast<std::size_t>(bundle.sigma_cum[n])];
    const i64 y = traj.positions[static_cast<std::size_t>(bundle.h_times[bundle.tau[n]])];
    ++report.checked;
    if (!(cfg.ell * x <= y && y <= cfg.ell * x + cfg.c - 1)) {
      ++report.violations;
      if (!report.first_violation) {
        report.first_violation = n;
      }
    }
    const i64 sigma_literal =
        n == 0 ? 0 : std::llabs(bundle.j_seq[n] - bundle.j_seq[n - 1]);
    const i64 x_lit = replay[static_cast<std::size_t>(sigma_literal)];
    if (!(cfg.ell * x_lit <= y && y <= cfg.ell * x_lit + cfg.c - 1)) {
      ++report.literal_sigma_violations;
    }
  }
  return report;
}

MegaArrowLaw mega_arrow_law(const JumpDistribution& q, const MegaVertexConfig& cfg) {
  MegaArrowLaw law;
  law.c = cfg.c;
  const double shrink = 1.0 - static_cast<double>(cfg.c - 1) / static_cast<double>(cfg.ell);
  law.p_plus_cookie = std::clamp(shrink * q.tail(cfg.ell + cfg.c - 1), 0.0, 1.0);
  law.p_plus_rest = 0.5;
  return law;
}

std::int8_t independent_arrow_at(const MegaArrowLaw& law, u64 seed, i64 j, i64 k) {
  const double u = uniform_at(seed, zigzag64(j), static_cast<u64>(k));
  return u > 1.0 - law.p_plus(k) ? std::int8_t{+1} : std::int8_t{-1};
}

ArrowSystem build_m_system(const MegaArrowLaw& law, u64 seed, i64 j_lo, i64 j_hi, i64 depth) {
  ArrowSystem out;
  for (i64 j = j_lo; j <= j_hi; ++j) {
    for (i64 k = 1; k <= depth; ++k) {
      out.append(j, independent_arrow_at(law, seed, j, k));
    }
  }
  return out;
}

BoundViolation::BoundViolation(i64 j_, i64 k_, double declared_, double bound_)
    : std::runtime_error([&] {
        std::ostringstream msg;
        msg << "strassen bundle: sampler declared P(+1) = " << declared_
            << " below the bound " << bound_ << " at (" << j_ << ", " << k_ << ")";
        return msg.str();
      }()),
      j(j_),
      k(k_),
      declared(declared_),
      bound(bound_) {}

StrassenBundle strassen_bundle(
    const MegaArrowLaw& bound,
    const std::function<double(i64, i64, const ArrowSystem&)>& sampler, u64 seed, i64 j_lo,
    i64 j_hi, i64 depth) {
  StrassenBundle out;
  for (i64 j = j_lo; j <= j_hi; ++j) {
    for (i64 k = 1; k <= depth; ++k) {
      const double b = bound.p_plus(k);
      const double p = sampler(j, k, out.upper);
      if (p < b - 1e-12) {
        throw BoundViolation(j, k, p, b);
      }
      const double u = uniform_at(seed, zigzag64(j), static_cast<u64>(k));
      const std::int8_t e = u > 1.0 - p ? std::int8_t{+1} : std::int8_t{-1};
      const std::int8_t m = u > 1.0 - b ? std::int8_t{+1} : std::int8_t{-1};
      out.upper.append(j, e);
      out.lower.append(j, m);
      ++out.indices;
      if (m == e) {
        ++out.equal;
      }
      if (m > e) {
        ++out.dominance_violations;
      }
    }
  }
  return out;
}

LandingStats landing_stats(const Trajectory& traj, const MegaVertexConfig& cfg,
                           const JumpDistribution& q) {
  return landing_stats(traj, cfg, q, scan_triggers(traj, cfg));
}

LandingStats landing_stats(const Trajectory& traj, const MegaVertexConfig& cfg,
                           const JumpDistribution& q, const TriggerScan& scan) {
  LandingStats stats;
  stats.kappa = std::pow(q.prob(-1), cfg.ell - cfg.c);

  std::vector<i64> h_times;
  for (const auto& rec : scan.records) {
    if (!rec.censored) {
      h_times.push_back(rec.t_enter);
    }
  }
  std::sort(h_times.begin(), h_times.end());
  for (std::size_t n = 1; n < h_times.size(); ++n) {
    if (h_times[n] <= h_times[n - 1]) {
      ++stats.h_spacing_violations;
    }
  }
  if (h_times.size() >= 2) {
    stats.final_h_slope = static_cast<double>(h_times.back() - h_times.front()) /
                          static_cast<double>(h_times.size() - 1);
  }

  // Resolve times, then one forward pass that watches each landing until it
  // succeeds or crosses past its tile.
  std::unordered_map<i64, int> resolves_at;
  for (const auto& rec : scan.records) {
    if (!rec.censored) {
      resolves_at[rec.t_resolve] += 1;
    }
  }

  struct OpenLanding {
    i64 tile = 0;
    bool cookie_mode = false;
  };
  std::vector<OpenLanding> open;
  std::unordered_set<i64> seen;
  std::unordered_map<i64, int> eaten;
  const i64 horizon = traj.horizon();
  for (i64 t = 0; t <= horizon; ++t) {
    const i64 y = traj.positions[static_cast<std::size_t>(t)];

    const auto evaluate = [&](const OpenLanding& landing, bool& closed, bool& success) {
      closed = false;
      success = false;
      const i64 h = landing.tile;
      if (y >= cfg.block_lo(h) + cfg.c) {
        closed = true;   // crossed past the tile: failure
        return;
      }
      const i64 left_edge = cfg.block_lo(h - 1) + cfg.c - 1;
      if (landing.cookie_mode) {
        if (y == left_edge || (y >= cfg.block_lo(h) && y <= cfg.block_hi(h))) {
          closed = true;
          success = true;
        }
      } else {
        if (y == left_edge || y == cfg.block_hi(h)) {
          closed = true;
          success = true;
        }
      }
    };

    for (std::size_t i = 0; i < open.size();) {
      bool closed = false, success = false;
      evaluate(open[i], closed, success);
      if (closed) {
        ++stats.landings;
        if (success) {
          ++stats.successes;
        }
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }

    const auto it = resolves_at.find(t);
    if (it != resolves_at.end()) {
      for (int n = 0; n < it->second; ++n) {
        OpenLanding landing;
        landing.tile = cfg.tile_of(y);
        const auto cnt = eaten.find(landing.tile);
        landing.cookie_mode = cfg.c - (cnt == eaten.end() ? 0 : cnt->second) > 0;
        bool closed = false, success = false;
        evaluate(landing, closed, success);
        if (closed) {
          ++stats.landings;
          if (success) {
            ++stats.successes;
          }
        } else {
          open.push_back(landing);
        }
      }
    }

    if (!seen.count(y)) {
      seen.insert(y);
      if (const auto jy = cfg.block_of(y)) {
        eaten[*jy] += 1;
      }
    }
  }
  stats.unresolved = open.size();
  stats.success_rate =
      stats.landings ? static_cast<double>(stats.successes) / static_cast<double>(stats.landings)
                     : 0.0;
  return stats;
}

} // namespace cwl
