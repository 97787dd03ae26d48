#include "compgen/dataset.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

using namespace compgen;
using sample::Domain;
using splits::Role;
using splits::SplitSpec;
using splits::Task;

namespace {

SplitSpec tiny_spec(Domain domain, Task task, std::uint64_t seed = 11) {
  SplitSpec spec;
  spec.domain = domain;
  spec.task = task;
  spec.sizes.train = 30;
  spec.sizes.test = 30;
  spec.seed = seed;
  return spec;
}

std::vector<data::DatasetRecord> tiny_records(Domain domain, Task task,
                                              Role role = Role::Train) {
  SplitSpec spec = tiny_spec(domain, task);
  spec.role = role;
  return data::make_records(splits::build_split(spec), spec);
}

struct TempFile {
  std::filesystem::path path;
  explicit TempFile(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {}
  ~TempFile() { std::filesystem::remove(path); }
};

}  // namespace

TEST_CASE("record ids are content digests of the specification") {
  const auto records = tiny_records(Domain::Scan, Task::Length);
  for (const auto& r : records) {
    REQUIRE(r.id == data::instance_id(r.instance));
    REQUIRE(r.id.size() == 16);
  }
  // same spec, same id; different spec, different id
  splits::TaskInstance a = records[0].instance;
  splits::TaskInstance b = records[1].instance;
  REQUIRE(data::instance_id(a) == data::instance_id(records[0].instance));
  REQUIRE(data::instance_id(a) != data::instance_id(b));
}

TEST_CASE("json round trip is lossless") {
  for (Domain domain : {Domain::Scan, Domain::RobustFill}) {
    const auto records = tiny_records(domain, Task::SwitchConceptOrder);
    for (const auto& r : records) {
      const data::DatasetRecord back = data::record_from_json(data::record_to_json(r));
      CHECK(back.id == r.id);
      CHECK(back.instance.domain == r.instance.domain);
      CHECK(back.instance.task == r.instance.task);
      CHECK(back.instance.role == r.instance.role);
      CHECK(back.instance.origin == r.instance.origin);
      CHECK(back.instance.command == r.instance.command);
      CHECK(back.instance.examples == r.instance.examples);
      CHECK(back.instance.target_tokens == r.instance.target_tokens);
      CHECK(back.instance.part_spans == r.instance.part_spans);
      CHECK(back.instance.length == r.instance.length);
      CHECK(back.instance.concept_labels == r.instance.concept_labels);
      CHECK(back.meta == r.meta);
    }
  }
}

TEST_CASE("jsonl files round trip") {
  const auto records = tiny_records(Domain::RobustFill, Task::Length);
  TempFile file("compgen_test_roundtrip.jsonl");
  data::write_jsonl(file.path, records);
  const auto back = data::read_jsonl(file.path);
  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    REQUIRE(back[i].id == records[i].id);
    REQUIRE(back[i].instance.spec_key() == records[i].instance.spec_key());
    REQUIRE(back[i].instance.target_tokens == records[i].instance.target_tokens);
  }
}

TEST_CASE("schema errors carry the line number") {
  TempFile file("compgen_test_badline.jsonl");
  {
    std::ofstream out(file.path);
    out << data::record_to_json(tiny_records(Domain::Scan, Task::Length)[0]).dump() << '\n';
    out << "{\"id\": \"zz\"}\n";
  }
  try {
    data::read_jsonl(file.path);
    FAIL("expected a schema error");
  } catch (const data::SchemaError& e) {
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
}

TEST_CASE("config digest changes iff a generation parameter changes") {
  const SplitSpec base = tiny_spec(Domain::Scan, Task::Length);
  const std::string digest = data::config_digest(base);
  REQUIRE(data::config_digest(base) == digest);

  SplitSpec changed = base;
  changed.role = Role::Test;  // role is not generation-relevant
  CHECK(data::config_digest(changed) == digest);

  changed = base;
  changed.seed += 1;
  CHECK(data::config_digest(changed) != digest);
  changed = base;
  changed.sizes.train += 1;
  CHECK(data::config_digest(changed) != digest);
  changed = base;
  changed.sizes.test += 1;
  CHECK(data::config_digest(changed) != digest);
  changed = base;
  changed.hardest_test_max = 5;
  CHECK(data::config_digest(changed) != digest);
  changed = base;
  changed.examples_per_task = 5;
  CHECK(data::config_digest(changed) != digest);
  changed = base;
  changed.input_len_max = 25;
  CHECK(data::config_digest(changed) != digest);
  changed = base;
  changed.task = Task::LengthHard;
  CHECK(data::config_digest(changed) != digest);
  changed = base;
  changed.domain = Domain::RobustFill;
  CHECK(data::config_digest(changed) != digest);
}

TEST_CASE("generated records validate cleanly") {
  for (Domain domain : {Domain::Scan, Domain::RobustFill}) {
    for (Task task : {Task::Length, Task::ComposeNewOperation}) {
      for (const auto& r : tiny_records(domain, task)) {
        const auto problems = data::validate_record(r);
        for (const auto& p : problems) UNSCOPED_INFO(p);
        REQUIRE(problems.empty());
      }
    }
  }
}

TEST_CASE("validation flags tampered records") {
  auto records = tiny_records(Domain::Scan, Task::Length);

  SECTION("wrong id") {
    records[0].id = "0000000000000000";
    REQUIRE_FALSE(data::validate_record(records[0]).empty());
  }
  SECTION("edited target token") {
    for (auto& t : records[0].instance.target_tokens) {
      if (t != "SEP") {
        t = t == "WALK" ? "RUN" : "WALK";
        break;
      }
    }
    REQUIRE_FALSE(data::validate_record(records[0]).empty());
  }
  SECTION("broken spans") {
    records[0].instance.part_spans.back().second += 1;
    REQUIRE_FALSE(data::validate_record(records[0]).empty());
  }
  SECTION("wrong length") {
    records[0].instance.length += 1;
    REQUIRE_FALSE(data::validate_record(records[0]).empty());
  }
  SECTION("wrong concept label") {
    // find a record whose first executed part is not right-directed and lie
    // about it
    for (auto& r : records) {
      if (r.instance.concept_labels[0] != "RIGHT") {
        r.instance.concept_labels[0] = "RIGHT";
        REQUIRE_FALSE(data::validate_record(r).empty());
        break;
      }
    }
  }
}

TEST_CASE("robustfill validation checks satisfaction") {
  auto records = tiny_records(Domain::RobustFill, Task::Length);
  auto& rec = records[0];
  rec.instance.examples[0].output += "x";
  rec.id = data::instance_id(rec.instance);  // keep the id honest
  const auto problems = data::validate_record(rec);
  bool found = false;
  for (const auto& p : problems) found = found || p.find("satisfy") != std::string::npos;
  REQUIRE(found);
}
