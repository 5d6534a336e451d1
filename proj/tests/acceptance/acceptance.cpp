// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ddtest/cli.hpp"
#include "ddtest/ddtest.hpp"

using namespace ddtest;

namespace {

const std::string kSkulls = std::string(DDTEST_DATA_DIR) + "/skulls.csv";
constexpr std::uint64_t kSeed = 1;

// Criterion 1
constexpr int kOracleInstances = 1000;
constexpr double kOracleSeconds = 30.0;
// Criteria 2, 3
constexpr std::size_t kNullSize = 500;
constexpr std::uint64_t kNullReps = 2000;
constexpr double kQuantileLo = 1.80, kQuantileHi = 2.12;
constexpr double kRejectLo = 0.035, kRejectHi = 0.065;
// Criterion 4
constexpr std::size_t kPowerSize = 300;
constexpr std::uint64_t kPowerReps = 500;
constexpr double kPowerSlack = 0.03;
constexpr double kPowerMarginOverDbr = 0.05;
// Criterion 5
constexpr int kIdentityReps = 200;
// Criteria 6, 7, 10
constexpr std::uint64_t kPermutations = 5000;
constexpr double kSkullProductMax = 0.01, kSkullSumMax = 0.01;
constexpr double kSkullMinLo = 0.01, kSkullMinHi = 0.08;
constexpr double kSkullDbrLo = 0.003, kSkullDbrHi = 0.04;
constexpr double kNoRejectAbove = 0.05;
// Criterion 8
constexpr std::uint64_t kAsymptoticDraws = 1000000;
constexpr double kAsymptoticMax = 0.01;
constexpr double kHalfNormalTarget = 0.05, kHalfNormalTol = 0.002;

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<SampleSet> skull_groups(const std::vector<std::string>& labels) {
  const auto ds = load_csv(kSkulls, "epoch");
  std::vector<SampleSet> out;
  for (const auto& l : labels) out.push_back(ds.group(l));
  return out;
}

Verdict oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(kSeed);
  std::uniform_int_distribution<std::size_t> size(2, 8), dim(1, 3);
  std::normal_distribution<double> z;
  const DepthKind kinds[] = {DepthKind::mahalanobis(), DepthKind::spatial(), DepthKind::projection(500, kSeed)};
  int equal = 0, both_raised = 0;
  for (int t = 0; t < kOracleInstances; ++t) {
    const std::size_t m = size(gen), n = size(gen), d = dim(gen);
    auto draw = [&](std::size_t rows) {
      Matrix a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d));
      for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = z(gen);
      return SampleSet(a);
    };
    const auto x = draw(m);
    const auto y = draw(n);
    const auto& kind = kinds[t % 3];
    std::optional<QualityPair> fast, slow;
    std::optional<ErrorCode> fast_err, slow_err;
    try {
      fast = quality(x, y, kind);
    } catch (const Error& e) {
      fast_err = e.code();
    }
    try {
      slow = quality_brute_oracle(x, y, kind);
    } catch (const Error& e) {
      slow_err = e.code();
    }
    if (fast && slow && *fast == *slow) ++equal;
    if (fast_err && slow_err && *fast_err == *slow_err) ++both_raised;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = equal + both_raised == kOracleInstances && secs < kOracleSeconds;
  return {ok, std::to_string(equal) + " equal, " + std::to_string(both_raised) +
                  " raised the same error in both (Mahalanobis with m or n <= d), of " + std::to_string(kOracleInstances) +
                  "; " + fmt("%.2f s", secs)};
}

Type1Row null_row() {
  ScenarioSpec spec;
  spec.m_grid = {kNullSize};
  spec.replications = kNullReps;
  spec.seed = kSeed;
  return type1_quantiles(spec).front();
}

Verdict half_normal_quantile(const Type1Row& row) {
  const bool ok = row.quantile >= kQuantileLo && row.quantile <= kQuantileHi;
  return {ok, "empirical 95% quantile of M* " + fmt("%.4f", row.quantile) + " in [" + fmt("%.2f", kQuantileLo) + ", " +
                  fmt("%.2f", kQuantileHi) + "]"};
}

Verdict type_one_error(const Type1Row& row) {
  const bool ok = row.rejection_rate >= kRejectLo && row.rejection_rate <= kRejectHi;
  return {ok, "rejection rate at cutoff " + fmt("%.6f", row.reference) + " = " + fmt("%.4f", row.rejection_rate) + " in [" +
                  fmt("%.3f", kRejectLo) + ", " + fmt("%.3f", kRejectHi) + "]"};
}

Verdict power_ordering() {
  ScenarioSpec spec;
  spec.scenario = Scenario::scale_shift;
  spec.m_grid = {kPowerSize};
  spec.replications = kPowerReps;
  spec.seed = kSeed;
  const auto table = power_table(spec, {Statistic::max, Statistic::min, Statistic::product, Statistic::sum, Statistic::dbr});
  auto rate = [&](const char* s) { return table.at(s, kPowerSize).rate; };
  const double p = rate("product"), s = rate("sum"), mstar = rate("min"), m = rate("max"), dbr = rate("dbr");
  bool ok = true;
  for (double top : {p, s}) {
    for (double other : {mstar, m, dbr}) ok = ok && top >= other - kPowerSlack;
    ok = ok && top >= dbr + kPowerMarginOverDbr;
  }
  std::ostringstream d;
  d << "power P=" << p << " S=" << s << " M*=" << mstar << " M=" << m << " DbR=" << dbr;
  return {ok, d.str()};
}

Verdict identity_convergence() {
  auto median_gap = [](std::size_t m) {
    ScenarioSpec spec;
    spec.seed = kSeed;
    std::vector<double> gaps(kIdentityReps);
    parallel_for(gaps.size(), 0, [&](std::size_t r) {
      const auto g = sample_scenario(spec, m, r);
      const auto q = quality(g[0], g[1], DepthKind::mahalanobis());
      gaps[r] = std::abs(q.q_fg + q.q_gf - 1.0);
    });
    std::nth_element(gaps.begin(), gaps.begin() + kIdentityReps / 2, gaps.end());
    const double upper = gaps[kIdentityReps / 2];
    const double lower = *std::max_element(gaps.begin(), gaps.begin() + kIdentityReps / 2);
    return 0.5 * (upper + lower);
  };
  const double small = median_gap(100), large = median_gap(1000);
  return {large < small, "median |q_fg + q_gf - 1|: m=n=100 " + fmt("%.5f", small) + ", m=n=1000 " + fmt("%.5f", large)};
}

std::vector<TestOutcome> skull_permutation(const std::vector<std::string>& labels, const DepthKind& kind) {
  CalibrationSpec spec;
  spec.replications = kPermutations;
  spec.seed = kSeed;
  return permutation_test(skull_groups(labels), {Statistic::min, Statistic::product, Statistic::sum, Statistic::dbr}, kind,
                          spec);
}

std::string describe(const std::vector<TestOutcome>& out) {
  std::ostringstream d;
  for (const auto& o : out) d << o.statistic_name << " p=" << *o.p_value << " ";
  return d.str();
}

Verdict skull_distant_epochs() {
  const auto out = skull_permutation({"c3300BC", "c200BC", "cAD150"}, DepthKind::mahalanobis());
  const double mstar = *out[0].p_value, p = *out[1].p_value, s = *out[2].p_value, dbr = *out[3].p_value;
  const bool ok = p <= kSkullProductMax && s <= kSkullSumMax && mstar >= kSkullMinLo && mstar <= kSkullMinHi &&
                  dbr >= kSkullDbrLo && dbr <= kSkullDbrHi;
  return {ok, describe(out)};
}

Verdict skull_close_epochs() {
  bool ok = true;
  std::string detail;
  for (const auto& kind : {DepthKind::mahalanobis(), DepthKind::spatial(), DepthKind::projection(500, kSeed)}) {
    const auto out = skull_permutation({"c1850BC", "c200BC", "cAD150"}, kind);
    for (const auto& o : out) ok = ok && *o.p_value > kNoRejectAbove;
    detail += to_string(kind.type) + ": " + describe(out) + " ";
  }
  return {ok, detail};
}

Verdict asymptotic_pvalue() {
  const auto groups = skull_groups({"c3300BC", "c200BC", "cAD150"});
  const double x = min_statistic_k(quality_matrix(groups, DepthKind::mahalanobis()));
  CalibrationSpec spec;
  spec.replications = kAsymptoticDraws;
  spec.seed = kSeed;
  const double p = mc_asymptotic_min_pvalue(x, sizes_of(groups), spec);
  const double two = mc_asymptotic_min_pvalue(1.96, {30, 30}, spec);
  const bool ok = p <= kAsymptoticMax && std::abs(two - kHalfNormalTarget) <= kHalfNormalTol;
  return {ok, "skull M*=" + fmt("%.5f", x) + " asymptotic p=" + fmt("%.6f", p) + "; k=2 at 1.96: " + fmt("%.5f", two)};
}

Verdict baseline_sanity() {
  std::mt19937_64 gen(kSeed);
  std::normal_distribution<double> z;
  Matrix a(20, 3);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = z(gen);
  const SampleSet x(a);
  std::vector<double> u(15);
  for (auto& v : u) v = z(gen);
  const auto ux = SampleSet::from_values(u);
  const double energy = energy_statistic(x, x).statistic;
  const double cramer = cramer_univariate(ux, ux);
  const double w = manova(x, x, ManovaTest::wilks).statistic;
  const double h = manova(x, x, ManovaTest::hotelling).statistic;
  const double t = manova(x, x, ManovaTest::pillai).statistic;
  bool singular_raised = false;
  std::string singular_detail = "returned a number";
  try {
    const auto flat = SampleSet::from_rows({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}, {4, 4, 4}});
    const auto d = depth(flat, flat, DepthKind::mahalanobis());
    singular_detail = "returned " + std::to_string(d.values[0]);
  } catch (const Error& e) {
    singular_raised = e.code() == ErrorCode::singular_covariance;
    singular_detail = "raised " + std::string(to_string(e.code()));
  }
  const bool ok = energy == 0.0 && cramer == 0.0 && w == 1.0 && h == 0.0 && t == 0.0 && singular_raised;
  std::ostringstream d;
  d << "energy=" << energy << " cramer=" << cramer << " (W,H,T)=(" << w << "," << h << "," << t << ") singular covariance "
    << singular_detail;
  return {ok, d.str()};
}

Verdict determinism() {
  auto run = [](const char* threads) {
    const std::vector<std::string> args = {"ddtest", "k-sample", "--input", kSkulls, "--group", "epoch", "--levels",
                                           "c3300BC,c200BC,cAD150", "--depth", "mahalanobis", "--stats", "min,product,sum,dbr",
                                           "--perms", std::to_string(kPermutations), "--seed", std::to_string(kSeed),
                                           "--format", "json", "--threads", threads};
    std::vector<const char*> argv;
    for (const auto& s : args) argv.push_back(s.c_str());
    std::ostringstream out, err;
    const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return std::make_pair(status, out.str());
  };
  const auto a = run("1"), b = run("1"), c = run("4");
  const bool ok = a.first == 0 && a.second == b.second && a.second == c.second && !a.second.empty();
  return {ok, "repeat identical: " + std::string(a.second == b.second ? "yes" : "no") +
                  ", 1 vs 4 threads identical: " + std::string(a.second == c.second ? "yes" : "no") + ", " +
                  std::to_string(a.second.size()) + " bytes"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::function<Verdict()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s criterion %d: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, v.detail.c_str(), secs);
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
  };
  report(1, oracle_equivalence);
  Type1Row row;
  report(2, [&] {
    row = null_row();
    return half_normal_quantile(row);
  });
  report(3, [&] { return type_one_error(row); });
  report(4, power_ordering);
  report(5, identity_convergence);
  report(6, skull_distant_epochs);
  report(7, skull_close_epochs);
  report(8, asymptotic_pvalue);
  report(9, baseline_sanity);
  report(10, determinism);
  return failures == 0 ? 0 : 1;
}
