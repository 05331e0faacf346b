#include "divctl/simulate.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <thread>

#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>

#include "divctl/errors.hpp"

namespace divctl {

namespace {

// Chunk sizes keep a barrier this many standard deviations away.
constexpr double kSafetySigmas = 6.0;
// Chunks that reflect at one barrier are capped at 2^5 steps, which keeps the
// midpoint discount of the flows inside them accurate.
constexpr std::size_t kMaxReflectLog2 = 5;

// Which barrier, if any, a chunk may touch; that one is handled exactly.
enum class Touch { None, Lower, Upper };

struct Chunk {
  std::uint64_t steps = 1;
  Touch touch = Touch::None;
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct Member {
  double dividends = 0.0;
  double injections = 0.0;
  double ruin_time = std::numeric_limits<double>::infinity();
};

// Starting points whose states coincide; stepped once. Discounted cash flows
// accumulate on the group and are flushed to the members on merge.
struct Group {
  double u;
  bool alive = true;
  double dividends = 0.0;
  double injections = 0.0;
  std::vector<std::size_t> members;
};

// One noise realisation driving several starting points.
class EnsembleRunner {
 public:
  EnsembleRunner(const ModelParams& model, const CostParams& costs, const Strategy& strategy,
                 const SimConfig& config)
      : model_(model),
        costs_(costs),
        strategy_(strategy),
        config_(config),
        horizon_(config.effective_horizon(model, costs)),
        levy_(is_levy_regime(model)),
        diffusive_(model.sigma_p > 0.0 || model.sigma_R > 0.0),
        second_noise_(model.sigma_R > 0.0 && std::abs(model.rho) < 1.0),
        rho_bar_(std::sqrt(std::max(0.0, 1.0 - model.rho * model.rho))),
        sqrt_dt_(std::sqrt(config.dt)),
        step_discount_(std::exp(-costs.delta * config.dt)),
        clock_(model.lambda) {
    // spread_[k]: safety band of a chunk of 2^k steps.
    for (double tau = config.dt; tau < horizon_ * 2.0 && spread_.size() < 63; tau *= 2.0)
      spread_.push_back(kSafetySigmas * model.sigma_p * std::sqrt(tau) + model.p * tau);
    for (std::size_t k = 0; k < spread_.size(); ++k)
      half_growth_.push_back(std::exp(0.5 * costs.delta * config.dt * std::ldexp(1.0, static_cast<int>(k))));
  }

  void run(const std::vector<double>& x0s, std::uint64_t path_index, std::vector<PathOutcome>& out) {
    PathState state = make_path_state(config_, path_index, 0.0);
    members_.assign(x0s.size(), Member{});
    groups_.clear();
    disc_ = 1.0;
    alive_ = true;
    for (std::size_t i = 0; i < x0s.size(); ++i) groups_.push_back(Group{x0s[i], true, 0.0, 0.0, {i}});
    for (auto& g : groups_) {
      upper_control(g, 0.0);
      lower_control(g, 0.0);
    }
    merge();

    double t = 0.0;
    double next_jump = clock_(state.jumps);
    while (t < horizon_ && alive_) {
      const double to_jump = next_jump - t;
      const double to_end = horizon_ - t;
      double h;
      Chunk chunk;
      bool jump_now = false;
      if (to_jump <= config_.dt && to_jump <= to_end) {
        h = to_jump;
        jump_now = true;
      } else if (to_end <= config_.dt) {
        h = to_end;
      } else {
        chunk = chunk_steps(std::min(to_jump, to_end));
        h = config_.dt * static_cast<double>(chunk.steps);
      }

      double dw_p = 0.0, dw_r = 0.0;
      if (diffusive_) {
        const double root = chunk.steps == 1 && !jump_now && h == config_.dt ? sqrt_dt_ : std::sqrt(h);
        dw_p = root * normal_(state.gauss) * state.sign;
        dw_r = model_.rho * dw_p;
        if (second_noise_) dw_r += rho_bar_ * root * normal_(state.gauss) * state.sign;
      }
      t = jump_now ? next_jump : t + h;
      disc_ *= h == config_.dt ? step_discount_ : std::exp(-costs_.delta * h);

      if (chunk.touch != Touch::None) {
        reflect_chunk(chunk, h, model_.sigma_p * dw_p, state, t);
      } else {
        for (auto& g : groups_) {
          if (!g.alive) continue;
          const double u = g.u;
          g.u = u + (model_.r * u - model_.p) * h + model_.sigma_p * dw_p + model_.sigma_R * u * dw_r;
          lower_control(g, t);
        }
      }
      if (jump_now) {
        const double y = model_.jump.sample(state.jumps);
        for (auto& g : groups_)
          if (g.alive) g.u += y;
        next_jump = t + clock_(state.jumps);
      }
      for (auto& g : groups_) upper_control(g, t);
      if (groups_.size() > 1) merge();
    }

    for (auto& g : groups_) {
      flush(g);
      for (std::size_t i : g.members) out[i].terminal_surplus = g.u;
    }
    for (std::size_t i = 0; i < members_.size(); ++i) {
      const Member& m = members_[i];
      PathOutcome& o = out[i];
      o.discounted_dividends = m.dividends;
      o.discounted_injections = m.injections;
      o.ruin_time = m.ruin_time;
      o.payoff = costs_.alpha * m.dividends - costs_.beta * m.injections;
    }
  }

 private:
  // Largest power-of-two number of dt steps fitting before `limit`. Either no
  // alive group can reach a barrier, or all of them stay clear of one barrier
  // and the other is applied exactly through the bridge extremum.
  Chunk chunk_steps(double limit) const {
    const double dt = config_.dt;
    if (!config_.aggregate || !levy_ || limit <= 2.0 * dt) return {};
    std::uint64_t max_steps = static_cast<std::uint64_t>(std::floor(limit / dt));
    if (static_cast<double>(max_steps) * dt >= limit) --max_steps;  // the jump step itself is taken separately
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& g : groups_) {
      if (!g.alive) continue;
      lo = std::min(lo, g.u);
      hi = std::max(hi, g.u);
    }
    // spread_ includes the drift, which only pushes down; conservative upwards.
    auto grow = [&](bool check_lo, bool check_hi, std::size_t cap) {
      std::uint64_t m = 1;
      std::size_t k = 1;
      while (k < spread_.size() && k <= cap && 2 * m <= max_steps && (!check_lo || lo - spread_[k] > 0.0) &&
             (!check_hi || hi + spread_[k] < strategy_.barrier)) {
        m *= 2;
        ++k;
      }
      return m;
    };
    Chunk best{grow(true, true, spread_.size()), Touch::None};
    if (best.steps >= (std::uint64_t{1} << kMaxReflectLog2)) return best;
    const std::uint64_t low = grow(false, true, kMaxReflectLog2);
    const std::uint64_t high = grow(true, false, kMaxReflectLog2);
    if (low > best.steps && low >= high) best = {low, Touch::Lower};
    else if (high > best.steps) best = {high, Touch::Upper};
    return best;
  }

  // Brownian increment `noise` over h with one barrier in reach. The extremum
  // of the free path given its endpoints follows from the bridge law; the
  // Skorokhod reflection there is exact. Flows are discounted at mid-chunk.
  void reflect_chunk(const Chunk& chunk, double h, double noise, PathState& state, double t) {
    const double drift = -model_.p * h;
    const double move = drift + noise;
    const double var = model_.sigma_p * model_.sigma_p * h;
    const double e = -std::log1p(-uniform_(state.gauss));
    const double half = 0.5 * std::sqrt(move * move + 2.0 * var * e);
    const std::size_t k = static_cast<std::size_t>(std::countr_zero(chunk.steps));
    const double mid = disc_ * half_growth_[k];
    if (chunk.touch == Touch::Lower) {
      const double low = 0.5 * move - half;
      for (auto& g : groups_) {
        if (!g.alive) continue;
        if (strategy_.inject) {
          const double l = std::max(0.0, -(g.u + low));
          g.injections += mid * l;
          g.u = g.u + move + l;
        } else if (g.u + low <= 0.0) {
          g.u = -1.0;
          lower_control(g, t);
        } else {
          g.u += move;
        }
      }
    } else {
      const double high = 0.5 * move + half;
      for (auto& g : groups_) {
        if (!g.alive) continue;
        const double d = std::max(0.0, g.u + high - strategy_.barrier);
        g.dividends += mid * d;
        g.u = g.u + move - d;
      }
    }
  }

  void flush(Group& g) {
    for (std::size_t i : g.members) {
      members_[i].dividends += g.dividends;
      members_[i].injections += g.injections;
    }
    g.dividends = g.injections = 0.0;
  }

  void lower_control(Group& g, double t) {
    if (!g.alive) return;
    if (strategy_.inject) {
      if (g.u < 0.0) {
        g.injections += disc_ * (-g.u);
        g.u = 0.0;
      }
    } else if (g.u <= 0.0) {
      g.alive = false;
      g.u = 0.0;
      for (std::size_t i : g.members) members_[i].ruin_time = t;
      alive_ = false;
      for (const auto& other : groups_) alive_ = alive_ || other.alive;
    }
  }

  void upper_control(Group& g, double) {
    if (!g.alive || !(g.u > strategy_.barrier)) return;
    g.dividends += disc_ * (g.u - strategy_.barrier);
    g.u = strategy_.barrier;
  }

  void merge() {
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      if (!groups_[i].alive) continue;
      for (std::size_t j = i + 1; j < groups_.size();) {
        Group& b = groups_[j];
        if (b.alive && b.u == groups_[i].u) {
          flush(groups_[i]);
          flush(b);
          groups_[i].members.insert(groups_[i].members.end(), b.members.begin(), b.members.end());
          groups_.erase(groups_.begin() + static_cast<std::ptrdiff_t>(j));
        } else {
          ++j;
        }
      }
    }
  }

  const ModelParams& model_;
  const CostParams& costs_;
  const Strategy& strategy_;
  const SimConfig& config_;
  double horizon_;
  bool levy_;
  bool diffusive_;
  bool second_noise_;
  double rho_bar_;
  double sqrt_dt_;
  double step_discount_;
  double disc_ = 1.0;
  bool alive_ = true;
  std::vector<double> spread_;
  std::vector<double> half_growth_;
  boost::random::uniform_01<double> uniform_;
  boost::random::exponential_distribution<double> clock_;
  boost::random::normal_distribution<double> normal_;
  std::vector<Member> members_;
  std::vector<Group> groups_;
};

double kahan_mean(const std::vector<double>& v) {
  double sum = 0.0, comp = 0.0;
  for (double x : v) {
    const double y = x - comp;
    const double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
  }
  return v.empty() ? 0.0 : sum / static_cast<double>(v.size());
}

}  // namespace

void SimConfig::check() const {
  auto bad = [](const char* field, const char* msg) {
    throw Error(ErrorCode::InvalidParameter, std::string(field) + ": " + msg);
  };
  if (!(dt > 0.0) || !std::isfinite(dt)) bad("sim.dt", "must be > 0");
  if (horizon > 0.0 && dt > horizon) bad("sim.dt", "must not exceed sim.horizon");
  if (n_paths < 1) bad("sim.n_paths", "must be >= 1");
  if (antithetic && n_paths % 2 != 0) bad("sim.n_paths", "must be even with antithetic pairing");
  if (!(discount_cutoff > 0.0 && discount_cutoff < 1.0)) bad("sim.discount_cutoff", "must lie in (0, 1)");
  if (threads < 0) bad("sim.threads", "must be >= 0");
}

double SimConfig::effective_horizon(const ModelParams& model, const CostParams& costs) const {
  const double nominal = horizon > 0.0 ? horizon : std::max(200.0 / costs.delta, 50.0 / model.lambda);
  return std::min(nominal, -std::log(discount_cutoff) / costs.delta);
}

PathState make_path_state(const SimConfig& config, std::uint64_t index, double x0) {
  const std::uint64_t base = config.antithetic ? (index & ~std::uint64_t{1}) : index;
  const std::uint64_t s = splitmix64(config.seed ^ base);
  PathState st;
  st.u = x0;
  st.jumps.seed(s);
  st.gauss.seed(splitmix64(s ^ 0xD1B54A32D192ED03ULL));
  st.sign = (config.antithetic && (index & 1)) ? -1.0 : 1.0;
  return st;
}

double truncation_bound(const ModelParams& model, const CostParams& costs, const Strategy& strategy,
                        const SimConfig& config) {
  const double T = config.effective_horizon(model, costs);
  const double b = strategy.barrier;
  const double root = std::sqrt(2.0 * costs.delta);
  double scale = costs.alpha * (b + (model.lambda * model.jump.mean() + model.r * b) / costs.delta +
                                (model.sigma_p + model.sigma_R * b) / root);
  if (strategy.inject) scale += costs.beta * (model.p / costs.delta + model.sigma_p / root);
  return std::exp(-costs.delta * T) * scale;
}

std::vector<std::vector<PathOutcome>> simulate_paths(const ModelParams& model, const CostParams& costs,
                                                     const Strategy& strategy, const std::vector<double>& x0s,
                                                     const SimConfig& config) {
  require_valid(model, costs);
  config.check();
  if (!(strategy.barrier >= 0.0)) throw Error(ErrorCode::InvalidParameter, "barrier must be >= 0");
  for (double x0 : x0s)
    if (!(x0 >= 0.0)) throw Error(ErrorCode::InvalidParameter, "x0 must be >= 0");

  const std::uint64_t n = config.n_paths;
  std::vector<std::vector<PathOutcome>> out(x0s.size(), std::vector<PathOutcome>(n));
  int workers = config.threads == 0 ? static_cast<int>(std::thread::hardware_concurrency()) : config.threads;
  workers = static_cast<int>(std::clamp<std::uint64_t>(static_cast<std::uint64_t>(std::max(workers, 1)), 1, n));

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    EnsembleRunner runner(model, costs, strategy, config);
    std::vector<PathOutcome> row(x0s.size());
    for (std::uint64_t k = begin; k < end; ++k) {
      runner.run(x0s, k, row);
      for (std::size_t i = 0; i < x0s.size(); ++i) out[i][k] = row[i];
    }
  };
  if (workers == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t block = (n + static_cast<std::uint64_t>(workers) - 1) / static_cast<std::uint64_t>(workers);
    for (int w = 0; w < workers; ++w) {
      const std::uint64_t begin = std::min(n, block * static_cast<std::uint64_t>(w));
      const std::uint64_t end = std::min(n, begin + block);
      pool.emplace_back(work, begin, end);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

PathOutcome simulate_path(const ModelParams& model, const CostParams& costs, const Strategy& strategy, double x0,
                          const SimConfig& config, std::uint64_t path_index) {
  require_valid(model, costs);
  config.check();
  std::vector<PathOutcome> row(1);
  EnsembleRunner runner(model, costs, strategy, config);
  runner.run({x0}, path_index, row);
  return row[0];
}

Estimate summarize(const std::vector<PathOutcome>& outcomes, const ModelParams& model, const CostParams& costs,
                   const Strategy& strategy, const SimConfig& config) {
  std::vector<double> samples;
  if (config.antithetic) {
    for (std::size_t k = 0; k + 1 < outcomes.size(); k += 2)
      samples.push_back(0.5 * (outcomes[k].payoff + outcomes[k + 1].payoff));
  } else {
    for (const auto& o : outcomes) samples.push_back(o.payoff);
  }
  Estimate e;
  e.n = outcomes.size();
  e.mean = kahan_mean(samples);
  std::vector<double> sq(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) sq[i] = (samples[i] - e.mean) * (samples[i] - e.mean);
  const double m = static_cast<double>(samples.size());
  e.std_err = samples.size() > 1 ? std::sqrt(kahan_mean(sq) * m / (m - 1.0) / m) : 0.0;
  e.horizon = config.effective_horizon(model, costs);
  e.truncation_bound = truncation_bound(model, costs, strategy, config);
  std::size_t ruined = 0, injected = 0;
  for (const auto& o : outcomes) {
    if (std::isfinite(o.ruin_time)) ++ruined;
    if (o.discounted_injections > 0.0) ++injected;
  }
  e.ruined_fraction = static_cast<double>(ruined) / static_cast<double>(outcomes.size());
  e.injected_fraction = static_cast<double>(injected) / static_cast<double>(outcomes.size());
  return e;
}

std::vector<Estimate> estimate_values(const ModelParams& model, const CostParams& costs, const Strategy& strategy,
                                      const std::vector<double>& x0s, const SimConfig& config) {
  const auto paths = simulate_paths(model, costs, strategy, x0s, config);
  std::vector<Estimate> out;
  for (const auto& p : paths) out.push_back(summarize(p, model, costs, strategy, config));
  return out;
}

Estimate estimate_value(const ModelParams& model, const CostParams& costs, const Strategy& strategy, double x0,
                        const SimConfig& config) {
  return estimate_values(model, costs, strategy, {x0}, config).front();
}

BarrierSearchResult search_barrier(const ModelParams& model, const CostParams& costs, bool inject, double x0,
                                   double lo, double hi, const SimConfig& config, int grid_points) {
  if (!(lo < hi) || lo < 0.0) throw Error(ErrorCode::InvalidParameter, "search_barrier needs 0 <= lo < hi");
  if (grid_points < 3) throw Error(ErrorCode::InvalidParameter, "search_barrier needs at least 3 grid points");
  SimConfig crn = config;
  // Aggregated chunks depend on the barrier and would misalign the noise.
  if (model.sigma_p > 0.0) crn.aggregate = false;

  BarrierSearchResult res;
  auto eval = [&](double b) {
    const Estimate e = estimate_value(model, costs, Strategy{b, inject}, x0, crn);
    res.profile.push_back({b, e.mean, e.std_err});
    return e;
  };
  for (int i = 0; i < grid_points; ++i) eval(lo + (hi - lo) * i / (grid_points - 1));

  double max_se = 0.0, vmin = res.profile.front().mean, vmax = vmin;
  std::size_t best = 0;
  for (std::size_t i = 0; i < res.profile.size(); ++i) {
    const auto& p = res.profile[i];
    max_se = std::max(max_se, p.std_err);
    vmin = std::min(vmin, p.mean);
    if (p.mean > res.profile[best].mean) best = i;
    vmax = std::max(vmax, p.mean);
  }
  if (vmax - vmin < 2.0 * max_se) {
    std::ostringstream msg;
    msg << "barrier profile varies by " << vmax - vmin << " < 2 * max std_err " << max_se;
    throw Error(ErrorCode::FlatProfile, msg.str());
  }

  // Vertex of the parabola through the best point and its neighbours.
  if (best > 0 && best + 1 < res.profile.size()) {
    const auto& l = res.profile[best - 1];
    const auto& c = res.profile[best];
    const auto& r = res.profile[best + 1];
    const double h = c.barrier - l.barrier;
    const double curv = l.mean - 2.0 * c.mean + r.mean;
    if (curv < 0.0) {
      const double vertex = c.barrier + 0.5 * h * (l.mean - r.mean) / curv;
      eval(std::clamp(vertex, l.barrier, r.barrier));
    }
  }
  const auto top = std::max_element(res.profile.begin(), res.profile.end(),
                                    [](const auto& a, const auto& b) { return a.mean < b.mean; });
  res.barrier = top->barrier;
  res.value = top->mean;
  res.std_err = top->std_err;
  std::sort(res.profile.begin(), res.profile.end(), [](const auto& a, const auto& b) { return a.barrier < b.barrier; });
  return res;
}

}  // namespace divctl
