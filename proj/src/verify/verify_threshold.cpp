#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "accmarket/analytic_dynamics.hpp"
#include "accmarket/data_io.hpp"
#include "accmarket/threshold_games.hpp"
#include "accmarket/util/parallel.hpp"
#include "accmarket/verify.hpp"
#include "verify_util.hpp"

namespace accmarket {
namespace {

using namespace detail;

void note_failure(PropertyResult& r, const std::string& what) {
  if (r.passed) r.detail = what;
  r.passed = false;
}

std::string spec_text(const GaussianMarketSpec& s) {
  std::ostringstream os;
  os.precision(17);
  os << "a=" << s.a << " sigma_neg=" << s.sigma_neg << " sigma_pos=" << s.sigma_pos << " prior=" << s.prior;
  return os.str();
}

GaussianMarketSpec random_spec(Rng& rng, bool balanced) {
  GaussianMarketSpec s;
  s.a = uniform_real(rng, 0.1, 3.0);
  s.sigma_neg = uniform_real(rng, 0.3, 3.0);
  s.sigma_pos = uniform_real(rng, 0.3, 3.0);
  s.prior = balanced ? 0.5 : uniform_real(rng, 0.15, 0.85);
  return s;
}

bool interior_roots_exist(const GaussianMarketSpec& s) {
  const auto [zl, zr] = response_targets(s);
  return !rho_inverse(s, zl).empty() && !rho_inverse(s, zr).empty();
}

}  // namespace

std::vector<PropertyResult> verify_threshold(const VerifyOptions& opts) {
  const bool full = opts.scale == Scale::Full;
  std::vector<PropertyResult> out;

  out.push_back(timed_property("threshold: candidate set contains a best response", [&](PropertyResult& r) {
    const std::size_t specs = full ? 1000 : 200;
    constexpr std::size_t kGrid = 100000;
    struct Case {
      GaussianMarketSpec spec;
      double tau_opp, lo, hi;
    };
    Rng rng(opts.seed ^ 0x31);
    std::vector<Case> cases;
    for (std::size_t k = 0; k < specs; ++k) {
      Case c{random_spec(rng, k % 2 == 0), uniform_real(rng, -3.0, 3.0), kNegInf, kPosInf};
      if (k % 3 == 1) {
        c.lo = uniform_real(rng, -4.0, 2.0);
        c.hi = c.lo + uniform_real(rng, 0.2, 4.0);
      }
      cases.push_back(c);
    }
    const auto gaps = parallel_map<double>(cases.size(), [&](std::size_t k) {
      const auto& c = cases[k];
      const auto br = analytic_best_response(c.spec, c.tau_opp, c.lo, c.hi);
      const double reach = std::abs(c.spec.a) + 8.0 * std::max(c.spec.sigma_neg, c.spec.sigma_pos);
      const double lo = std::isfinite(c.lo) ? c.lo : -reach;
      const double hi = std::isfinite(c.hi) ? c.hi : reach;
      double best = std::max(analytic_threshold_share(c.lo, c.tau_opp, c.spec),
                             analytic_threshold_share(c.hi, c.tau_opp, c.spec));
      for (std::size_t g = 0; g < kGrid; ++g) {
        const double t = lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(kGrid - 1);
        best = std::max(best, analytic_threshold_share(t, c.tau_opp, c.spec));
      }
      return best - br.share;
    });
    double worst = -1.0;
    for (std::size_t k = 0; k < gaps.size(); ++k) {
      worst = std::max(worst, gaps[k]);
      if (gaps[k] > 1e-6) note_failure(r, "grid beats candidates by " + std::to_string(gaps[k]) + " at " +
                                              spec_text(cases[k].spec));
    }
    r.cases = cases.size();
    if (r.passed) r.detail = "largest grid advantage " + std::to_string(std::max(worst, 0.0));
  }));

  out.push_back(timed_property("threshold: dynamics settle after one round", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x32);
    for (std::size_t k = 0; k < 1000; ++k) {
      AnalyticDynamicsConfig cfg;
      cfg.spec = random_spec(rng, k % 2 == 0);
      const double t0 = uniform_real(rng, -3.0, 3.0);
      cfg.init = std::array<double, 2>{t0, t0};
      cfg.rounds = 3;
      const auto traj = run_analytic_dynamics(cfg);
      if (traj.adopted.size() < 2 || traj.adopted[1] != 0) {
        note_failure(r, "moves in round 2 from tau0=" + std::to_string(t0) + " at " + spec_text(cfg.spec));
      }
      ++r.cases;
    }
  }));

  out.push_back(timed_property("threshold: a response from h_opt also raises the rival's share",
                               [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x33);
    for (std::size_t k = 0; k < 1000; ++k) {
      AnalyticDynamicsConfig cfg;
      cfg.spec = random_spec(rng, k % 2 == 0);
      cfg.rounds = 1;
      const auto traj = run_analytic_dynamics(cfg);
      for (std::size_t s = 1; s < traj.steps.size(); ++s) {
        const std::size_t mover = *traj.steps[s].mover;
        const std::size_t other = 1 - mover;
        if (traj.steps[s].shares[other] < traj.steps[s - 1].shares[other] - 1e-12) {
          note_failure(r, "provider " + std::to_string(other) + " lost share when " + std::to_string(mover) +
                              " responded at " + spec_text(cfg.spec));
        }
      }
      ++r.cases;
    }
  }));

  out.push_back(timed_property("threshold: shared start gains share and welfare", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x34);
    for (std::size_t k = 0; k < 1000; ++k) {
      AnalyticDynamicsConfig cfg;
      cfg.spec = random_spec(rng, k % 2 == 0);
      const auto traj = run_analytic_dynamics(cfg);
      const auto& first = traj.steps.front();
      const auto& last = traj.steps.back();
      bool ok = last.welfare >= first.welfare - 1e-12;
      for (std::size_t i = 0; i < 2; ++i) ok = ok && last.shares[i] >= first.shares[i] - 1e-12;
      if (!ok) note_failure(r, spec_text(cfg.spec));
      ++r.cases;
    }
  }));

  out.push_back(timed_property("threshold: second mover ends with the larger share", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x35);
    std::size_t tried = 0;
    while (r.cases < 100 && tried < 10000) {
      ++tried;
      AnalyticDynamicsConfig cfg;
      cfg.spec = random_spec(rng, tried % 2 == 0);
      if (!interior_roots_exist(cfg.spec)) continue;
      const auto traj = run_analytic_dynamics(cfg);
      if (traj.outcome.shares[1] < traj.outcome.shares[0] - 1e-12) {
        note_failure(r, "mu2=" + std::to_string(traj.outcome.shares[1]) + " < mu1=" +
                            std::to_string(traj.outcome.shares[0]) + " at " + spec_text(cfg.spec));
      }
      ++r.cases;
    }
  }));

  out.push_back(timed_property("threshold: under MLR responses land on the two ratio roots", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x36);
    for (std::size_t k = 0; k < 1000; ++k) {
      GaussianMarketSpec s;
      s.a = uniform_real(rng, 0.2, 3.0);
      s.sigma_neg = s.sigma_pos = uniform_real(rng, 0.3, 3.0);
      const double tau = uniform_real(rng, -3.0, 3.0);
      const double half = rho_inverse(s, 0.5).at(0);
      const double two = rho_inverse(s, 2.0).at(0);
      const auto br = analytic_best_response(s, tau);
      if (br.tau != half && br.tau != two) {
        note_failure(r, "response " + std::to_string(br.tau) + " to " + std::to_string(tau) + " at " + spec_text(s));
      }
      ++r.cases;
    }
  }));

  out.push_back(timed_property("threshold: interval integration matches pairwise shares", [&](PropertyResult& r) {
    Rng rng(opts.seed ^ 0x37);
    for (std::size_t k = 0; k < 1000; ++k) {
      const auto s = random_spec(rng, k % 2 == 0);
      std::array<double, 2> taus{uniform_real(rng, -3.0, 3.0), uniform_real(rng, -3.0, 3.0)};
      if (k % 5 == 0) taus[1] = taus[0];
      if (k % 7 == 0) taus[0] = k % 2 ? kNegInf : kPosInf;
      const auto o = analytic_outcome(taus, s);
      const double s0 = analytic_threshold_share(taus[0], taus[1], s);
      const double s1 = analytic_threshold_share(taus[1], taus[0], s);
      if (std::abs(o.shares[0] - s0) > 1e-12 || std::abs(o.shares[1] - s1) > 1e-12 ||
          std::abs(o.welfare - s0 - s1) > 1e-12) {
        note_failure(r, spec_text(s));
      }
      ++r.cases;
    }
  }));

  out.push_back(timed_property("threshold: sampled best response tracks the analytic one", [&](PropertyResult& r) {
    std::vector<GaussianMarketSpec> specs{{1.0, 2.0, 1.0, 0.5}, {1.0, 1.0, 1.0, 0.5}};
    if (full) {
      specs.push_back({0.7, 1.5, 0.8, 0.5});
      specs.push_back({1.5, 1.0, 1.0, 0.3});
    }
    constexpr std::size_t kSamples = 200000;
    for (std::size_t k = 0; k < specs.size(); ++k) {
      const auto& s = specs[k];
      const Dataset data = sample_gaussian_market(s, kSamples, derive_seed(opts.seed, 0x38 + k));
      const double opp = optimal_threshold(s);
      std::vector<double> xs(data.size());
      std::vector<double> w(data.size());
      for (std::size_t j = 0; j < data.size(); ++j) {
        xs[j] = data.at(j, 0);
        const bool opp_correct = (xs[j] > opp ? kPositive : kNegative) == data.label(j);
        w[j] = opp_correct ? 0.5 : 1.0;
      }
      const auto emp = empirical_threshold_br(xs, data.labels(), w);
      const auto ana = analytic_best_response(s, opp);
      // Symmetric specs have two optimal responses; accept the closer one.
      double dist = std::abs(emp.tau - ana.tau);
      for (double c : best_response_candidates(s, opp)) {
        if (std::abs(analytic_threshold_share(c, opp, s) - ana.share) <= 1e-9) {
          dist = std::min(dist, std::abs(emp.tau - c));
        }
      }
      if (dist > 0.05 || std::abs(emp.share - ana.share) > 0.01) {
        note_failure(r, "tau " + std::to_string(emp.tau) + " vs " + std::to_string(ana.tau) + ", share " +
                            std::to_string(emp.share) + " vs " + std::to_string(ana.share) + " at " + spec_text(s));
      }
      ++r.cases;
    }
  }));

  return out;
}

}  // namespace accmarket
