#include "compgen/sampling.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <map>

using namespace compgen;
using sample::ConceptPattern;
using sample::ConstraintSet;
using sample::Domain;
using sample::RfConcept;
using sample::SamplerConfig;
using sample::ScanConcept;

TEST_CASE("concept of a scan part follows its direction") {
  CHECK(sample::concept_of_scan_part(scan::Part{scan::Verb::Jump, scan::Modifier::Around,
                                                scan::Direction::Left}) == ScanConcept::Left);
  CHECK(sample::concept_of_scan_part(scan::Part{scan::Verb::Run, scan::Modifier::Plain,
                                                scan::Direction::Right}) ==
        ScanConcept::Right);
  CHECK(sample::concept_of_scan_part(scan::Part{scan::Verb::Walk}) == ScanConcept::None);
}

TEST_CASE("concept of an expression follows its grouping") {
  CHECK(sample::concept_of_rf_expression(rf::Expression{rf::SubstringOp{rf::SubStr{1, 3}}}) ==
        RfConcept::Substring);
  CHECK(sample::concept_of_rf_expression(rf::Expression{rf::ConstStr{'a'}}) ==
        RfConcept::NonSubstring);
  CHECK(sample::concept_of_rf_expression(rf::Expression{rf::ModificationOp{rf::Trim{}}}) ==
        RfConcept::NonSubstring);
  CHECK(sample::concept_of_rf_expression(rf::Expression{rf::Compose{
            rf::ToCase{rf::CaseStyle::Lower}, rf::ModificationOp{rf::Trim{}}}}) ==
        RfConcept::Compose);
}

TEST_CASE("identical configs produce identical streams") {
  SamplerConfig cfg;
  cfg.seed = 99;
  cfg.lengths = {1, 2, 3};
  sample::ScanSampler a(cfg);
  sample::ScanSampler b(cfg);
  for (int i = 0; i < 200; ++i) {
    REQUIRE(a.sample() == b.sample());
  }

  SamplerConfig rcfg = cfg;
  rcfg.domain = Domain::RobustFill;
  sample::RfSampler ra(rcfg);
  sample::RfSampler rb(rcfg);
  for (int i = 0; i < 50; ++i) {
    const auto sa = ra.sample();
    const auto sb = rb.sample();
    REQUIRE(sa.program == sb.program);
    REQUIRE(sa.examples == sb.examples);
  }
}

TEST_CASE("part counts are uniform over the allowed lengths") {
  SamplerConfig cfg;
  cfg.seed = 1234;
  cfg.lengths = {1, 2, 3, 4, 5, 6};
  sample::ScanSampler sampler(cfg);
  std::map<std::size_t, int> hist;
  const int kSamples = 10000;
  for (int i = 0; i < kSamples; ++i) ++hist[scan::part_count(sampler.sample())];
  REQUIRE(hist.size() == 6);
  for (const auto& [len, count] : hist) {
    const double freq = static_cast<double>(count) / kSamples;
    INFO("length " << len << " frequency " << freq);
    REQUIRE(freq > 1.0 / 6 - 0.02);
    REQUIRE(freq < 1.0 / 6 + 0.02);
  }
}

TEST_CASE("robustfill part counts stay near uniform") {
  SamplerConfig cfg;
  cfg.domain = Domain::RobustFill;
  cfg.seed = 911;
  cfg.lengths = {1, 2, 3, 4, 5, 6};
  sample::RfSampler sampler(cfg);
  std::map<std::size_t, int> hist;
  const int kSamples = 10000;
  for (int i = 0; i < kSamples; ++i) ++hist[sampler.sample().program.expressions.size()];
  REQUIRE(hist.size() == 6);
  for (const auto& [len, count] : hist) {
    const double freq = static_cast<double>(count) / kSamples;
    INFO("length " << len << " frequency " << freq);
    REQUIRE(freq > 1.0 / 6 - 0.02);
    REQUIRE(freq < 1.0 / 6 + 0.02);
  }
}

TEST_CASE("forbidden phrases never appear") {
  SamplerConfig cfg;
  cfg.seed = 5;
  cfg.lengths = {1};
  cfg.constraints.forbidden = {"jump"};
  sample::ScanSampler sampler(cfg);
  for (int i = 0; i < 1000; ++i) {
    const auto c = sampler.sample();
    CHECK(scan::print_command(c).find("jump") == std::string::npos);
  }
}

TEST_CASE("a fixed part count yields the matching conjunction count") {
  SamplerConfig cfg;
  cfg.seed = 6;
  cfg.lengths = {3};
  sample::ScanSampler sampler(cfg);
  for (int i = 0; i < 500; ++i) {
    REQUIRE(scan::part_count(sampler.sample()) == 3);
  }
}

TEST_CASE("all-left pattern uses only left-direction phrases") {
  SamplerConfig cfg;
  cfg.seed = 7;
  cfg.lengths = {2, 3};
  cfg.constraints.pattern = ConceptPattern::AllA;
  sample::ScanSampler sampler(cfg);
  for (int i = 0; i < 500; ++i) {
    for (const scan::Part& p : scan::part_phrases(sampler.sample())) {
      REQUIRE(sample::concept_of_scan_part(p) == ScanConcept::Left);
    }
  }
}

TEST_CASE("ordered concept patterns split at the ceiling of half") {
  SamplerConfig cfg;
  cfg.seed = 8;
  cfg.lengths = {2, 3, 4, 5};
  cfg.constraints.pattern = ConceptPattern::AThenB;
  sample::ScanSampler sampler(cfg);
  for (int i = 0; i < 500; ++i) {
    const auto parts = scan::part_phrases(sampler.sample());
    const std::size_t head = (parts.size() + 1) / 2;
    for (std::size_t k = 0; k < parts.size(); ++k) {
      REQUIRE(sample::concept_of_scan_part(parts[k]) ==
              (k < head ? ScanConcept::Left : ScanConcept::Right));
    }
  }
}

TEST_CASE("forbidding Compose removes it from sampled programs") {
  SamplerConfig cfg;
  cfg.domain = Domain::RobustFill;
  cfg.seed = 9;
  cfg.lengths = {2, 3, 4, 5, 6};
  cfg.constraints.forbidden = {"Compose"};
  sample::RfSampler sampler(cfg);
  for (int i = 0; i < 300; ++i) {
    for (const rf::Expression& e : sampler.sample().program.expressions) {
      REQUIRE_FALSE(std::holds_alternative<rf::Compose>(e));
    }
  }
}

TEST_CASE("requiring Compose in a one-part program forces a Compose expression") {
  SamplerConfig cfg;
  cfg.domain = Domain::RobustFill;
  cfg.seed = 10;
  cfg.lengths = {1};
  cfg.constraints.required = {"Compose"};
  sample::RfSampler sampler(cfg);
  for (int i = 0; i < 200; ++i) {
    const auto s = sampler.sample();
    REQUIRE(s.program.expressions.size() == 1);
    REQUIRE(std::holds_alternative<rf::Compose>(s.program.expressions[0]));
  }
}

TEST_CASE("every emitted pair satisfies its own examples") {
  SamplerConfig cfg;
  cfg.domain = Domain::RobustFill;
  cfg.seed = 11;
  cfg.lengths = {1, 2, 3, 4, 5, 6};
  sample::RfSampler sampler(cfg);
  for (int i = 0; i < 1000; ++i) {
    const auto s = sampler.sample();
    REQUIRE(s.examples.size() == 4);
    REQUIRE(rf::satisfies(s.program, s.examples));
    for (const rf::IoExample& ex : s.examples) {
      REQUIRE_FALSE(ex.input.empty());
      REQUIRE_FALSE(ex.output.empty());
      for (char c : ex.input) REQUIRE(rf::is_string_char(c));
    }
  }
}

TEST_CASE("emitted samples satisfy their constraint set") {
  SamplerConfig cfg;
  cfg.domain = Domain::RobustFill;
  cfg.seed = 12;
  cfg.lengths = {2, 3, 4};
  cfg.constraints.pattern = ConceptPattern::Mixed;
  sample::RfSampler sampler(cfg);
  for (int i = 0; i < 300; ++i) {
    REQUIRE(sample::rf_satisfies(sampler.sample().program, cfg.constraints));
  }

  SamplerConfig scfg;
  scfg.seed = 13;
  scfg.lengths = {1, 2, 3};
  scfg.constraints.required = {"around right"};
  sample::ScanSampler ssampler(scfg);
  for (int i = 0; i < 300; ++i) {
    REQUIRE(sample::scan_satisfies(ssampler.sample(), scfg.constraints));
  }
}

TEST_CASE("contradictory constraints raise a generation error") {
  SamplerConfig cfg;
  cfg.seed = 14;
  cfg.lengths = {1};
  cfg.constraints.required = {"jump"};
  cfg.constraints.forbidden = {"jump"};
  sample::ScanSampler sampler(cfg);
  CHECK_THROWS_AS(sampler.sample(), sample::GenerationError);

  // mixed concepts cannot fit in a single part
  SamplerConfig mixed;
  mixed.seed = 15;
  mixed.lengths = {1};
  mixed.constraints.pattern = ConceptPattern::Mixed;
  sample::ScanSampler msampler(mixed);
  CHECK_THROWS_AS(msampler.sample(), sample::GenerationError);
}

TEST_CASE("special generators produce the fixed forms") {
  CHECK(scan::print_command(sample::ScanSampler::special_bare_jump()) == "jump");

  SamplerConfig cfg;
  cfg.domain = Domain::RobustFill;
  cfg.seed = 16;
  sample::RfSampler sampler(cfg);
  for (int i = 0; i < 100; ++i) {
    const auto s = sampler.sample_special();
    REQUIRE(s.program.expressions.size() == 1);
    REQUIRE(std::holds_alternative<rf::Compose>(s.program.expressions[0]));
    REQUIRE(rf::satisfies(s.program, s.examples));
  }
}
