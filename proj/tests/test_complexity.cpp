#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "rmtlab/complexity.hpp"

using namespace rmtlab;

namespace {

EnsembleSpec gue2() {
  EnsembleSpec s;
  s.kind = EnsembleKind::Gue;
  s.dim = 2;
  return s;
}

UnitaryMatrix word_product(const GateSet& gs, const std::vector<int>& letters) {
  ComplexMatrix u = ComplexMatrix::Identity(gs.dim, gs.dim);
  for (int g : letters) u = (u * gs.gates[static_cast<std::size_t>(g)].matrix()).eval();
  return UnitaryMatrix(u);
}

}  // namespace

TEST_CASE("default gate set is valid with the advertised relations") {
  const GateSet gs = default_two_gate_set();
  REQUIRE(gs.size() == 2);
  CHECK(gs.dim == 2);
  gs.validate();

  // r16 has order 16 projectively; had is an involution.
  const UnitaryMatrix r16_16 = word_product(gs, std::vector<int>(16, 0));
  CHECK(opnorm_proj_distance(r16_16, UnitaryMatrix::identity(2)) < 1e-12);
  const UnitaryMatrix r16_8 = word_product(gs, std::vector<int>(8, 0));
  CHECK(opnorm_proj_distance(r16_8, UnitaryMatrix::identity(2)) > 0.5);
  const UnitaryMatrix had2 = word_product(gs, {1, 1});
  CHECK(opnorm_proj_distance(had2, UnitaryMatrix::identity(2)) < 1e-12);
}

TEST_CASE("gate set files round trip") {
  const GateSet gs = default_two_gate_set();
  const std::string path = "test_complexity_gs.tmp";
  write_gate_set_file(path, gs);
  const GateSet back = read_gate_set_file(path);
  REQUIRE(back.size() == gs.size());
  CHECK(back.dim == gs.dim);
  for (std::size_t i = 0; i < gs.size(); ++i) {
    CHECK(back.labels[i] == gs.labels[i]);
    CHECK((back.gates[i].matrix() - gs.gates[i].matrix()).cwiseAbs().maxCoeff() == 0.0);
  }
  std::remove(path.c_str());
}

TEST_CASE("enumerate_words: lengths ascend and tol 0 keeps distinct words only") {
  const GateSet gs = default_two_gate_set();
  const auto words = enumerate_words(gs, 6, 0.0);
  REQUIRE(!words.empty());
  CHECK(words.front().length() == 0);  // identity first
  for (std::size_t i = 1; i < words.size(); ++i)
    CHECK(words[i].length() >= words[i - 1].length());
  // All kept words are pairwise projectively distinct.
  for (std::size_t i = 0; i < words.size(); ++i)
    for (std::size_t j = i + 1; j < words.size(); ++j) {
      const double dist = opnorm_proj_distance(UnitaryMatrix(words[i].u),
                                               UnitaryMatrix(words[j].u));
      CHECK(dist > 1e-12);
    }
  // Each word's matrix equals the product of its letters.
  const auto& w = words.back();
  CHECK((word_product(gs, w.letters).matrix() - w.u).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("enumerate_words enforces the budget with the count in the message") {
  const GateSet gs = default_two_gate_set();
  CHECK_THROWS_AS(enumerate_words(gs, 40, 0.0, 1000), std::invalid_argument);
  try {
    enumerate_words(gs, 40, 0.0, 1000);
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("1000") != std::string::npos);
  }
}

TEST_CASE("dedup tolerance above eps/4 is rejected") {
  const GateSet gs = default_two_gate_set();
  const UnitaryMatrix target = sample_haar_unitary(2, {149, 0});
  CHECK_THROWS_AS(exact_unitary_complexity(target, gs, 0.2, 5, ChannelMetric::Diamond, 0.1),
                  std::invalid_argument);
  CHECK_NOTHROW(exact_unitary_complexity(target, gs, 0.2, 5, ChannelMetric::Diamond, 0.05));
}

TEST_CASE("identity and single gates have complexity 0 and 1") {
  const GateSet gs = default_two_gate_set();
  const auto id_ans = exact_unitary_complexity(UnitaryMatrix::identity(2), gs, 0.1, 5,
                                               ChannelMetric::Diamond, 0.0);
  CHECK(id_ans.value == 0);
  CHECK(!id_ans.exceeds);
  const auto r16_ans = exact_unitary_complexity(gs.gates[0], gs, 0.01, 5,
                                                ChannelMetric::Diamond, 0.0);
  CHECK(r16_ans.value == 1);
  const auto had_ans = exact_unitary_complexity(gs.gates[1], gs, 0.01, 5,
                                                ChannelMetric::OpNormProj, 0.0);
  CHECK(had_ans.value == 1);
}

TEST_CASE("oracle equals dedup-free exhaustive search at tol = 0") {
  const GateSet gs = default_two_gate_set();
  for (int rep = 0; rep < 10; ++rep) {
    const UnitaryMatrix target =
        sample_haar_unitary(2, {151, static_cast<std::uint64_t>(rep)});
    for (double eps : {0.15, 0.3}) {
      for (ChannelMetric m : {ChannelMetric::Diamond, ChannelMetric::OpNormProj}) {
        const auto fast = exact_unitary_complexity(target, gs, eps, 7, m, 0.0);
        const auto slow = exhaustive_unitary_complexity(target, gs, eps, 7, m);
        CHECK(fast.value == slow.value);
        CHECK(fast.exceeds == slow.exceeds);
      }
    }
  }
}

TEST_CASE("state complexity oracle equals exhaustive search") {
  const GateSet gs = default_two_gate_set();
  const PureState psi0 = PureState::basis_state(2, 0);
  for (int rep = 0; rep < 8; ++rep) {
    const PureState target = sample_haar_state(2, {157, static_cast<std::uint64_t>(rep)});
    const auto fast = exact_state_complexity(target, gs, psi0, 0.2, 7, 0.0);
    const auto slow = exhaustive_state_complexity(target, gs, psi0, 0.2, 7);
    CHECK(fast.value == slow.value);
    CHECK(fast.exceeds == slow.exceeds);
  }
  // One step: had |0> needs exactly one gate.
  const PureState plus = apply_state(gs.gates[1], psi0);
  const auto one = exact_state_complexity(plus, gs, psi0, 1e-9, 4, 0.0);
  CHECK(one.value == 1);
}

TEST_CASE("complexity is monotone in eps") {
  const GateSet gs = default_two_gate_set();
  for (int rep = 0; rep < 6; ++rep) {
    const UnitaryMatrix target =
        sample_haar_unitary(2, {163, static_cast<std::uint64_t>(rep)});
    int prev = -1;
    for (double eps : {0.5, 0.3, 0.2, 0.1}) {
      const auto ans =
          exact_unitary_complexity(target, gs, eps, 8, ChannelMetric::Diamond, 0.0);
      if (prev >= 0) CHECK(ans.value >= prev);
      prev = ans.value;
    }
  }
}

TEST_CASE("default dedup tolerance answers stay inside the eps bracket") {
  const GateSet gs = default_two_gate_set();
  const double eps = 0.2;
  const double tol = eps / 4.0;
  for (int rep = 0; rep < 8; ++rep) {
    const UnitaryMatrix target =
        sample_haar_unitary(2, {167, static_cast<std::uint64_t>(rep)});
    const auto pruned =
        exact_unitary_complexity(target, gs, eps, 8, ChannelMetric::Diamond);
    const auto loose =
        exhaustive_unitary_complexity(target, gs, eps + tol, 8, ChannelMetric::Diamond);
    const auto tight =
        exhaustive_unitary_complexity(target, gs, eps - tol, 8, ChannelMetric::Diamond);
    CHECK(pruned.value >= loose.value);
    CHECK(pruned.value <= tight.value);
  }
}

TEST_CASE("complexity jump curve: flat start, positive tail, sane report") {
  const GateSet gs = default_two_gate_set();
  const std::vector<double> grid = {0.01, 2.0};
  const auto rep = complexity_jump_curve(gue2(), gs, 0.2, grid, 20, 8,
                                         ChannelMetric::Diamond, {173, 0});
  REQUIRE(rep.t_grid.size() == 2);
  REQUIRE(rep.curves.size() == 20);
  CHECK(rep.n_words > 0);
  // At t = 0.01 the evolution hugs the identity: complexity 0 for everyone.
  CHECK(rep.median[0] == 0);
  CHECK(rep.frac_positive[0] == 0.0);
  // At t = 2 most samples have left the ball.
  CHECK(rep.frac_positive[1] > 0.5);
  CHECK(rep.median[1] >= 1);
  CHECK(rep.threshold_t == 2.0);
  // Determinism across jobs settings.
  const auto rep2 = complexity_jump_curve(gue2(), gs, 0.2, grid, 20, 8,
                                          ChannelMetric::Diamond, {173, 0}, -1.0,
                                          1'000'000, 3);
  for (std::size_t i = 0; i < rep.curves.size(); ++i)
    for (std::size_t j = 0; j < rep.t_grid.size(); ++j)
      CHECK(rep.curves[i].values[j] == rep2.curves[i].values[j]);
}

TEST_CASE("union bound diagnostic is a true upper bound by construction") {
  const GateSet gs = default_two_gate_set();
  const auto rep = union_bound_diagnostic(gue2(), gs, 0.2, 1.0, 3, 100,
                                          ChannelMetric::Diamond, {179, 0});
  CHECK(rep.k == 3);
  CHECK(rep.n_samples == 100);
  for (const auto& row : rep.rows) {
    CHECK(row.length < 3);
    CHECK(row.frequency >= 0.0);
    CHECK(row.frequency <= 1.0);
  }
  CHECK(rep.sum_frequencies >= rep.freq_low_complexity - 1e-12);
  CHECK(rep.freq_low_complexity >= 0.0);
  CHECK(rep.freq_low_complexity <= 1.0);
}
