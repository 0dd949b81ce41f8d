#include "behave/task_data.hpp"

#include <cmath>
#include <numeric>
#include <set>

#include "behave/csv.hpp"
#include "behave/rng.hpp"

namespace behave {

using nlohmann::json;

CollapseRule CollapseRule::binary() {
  CollapseRule r;
  for (const char* k : {"hateful", "1"}) r.mapping[k] = Label::Hateful;
  for (const char* k : {"non-hateful", "0"}) r.mapping[k] = Label::NonHateful;
  return r;
}

CollapseRule CollapseRule::from_json(const json& j) {
  CollapseRule r;
  if (!j.is_object()) throw ConfigError("collapse rule must be an object of raw label -> label");
  for (const auto& [raw, target] : j.items()) {
    const auto label = parse_label(target.get<std::string>());
    if (!label) throw ConfigError("collapse rule: '" + raw + "' maps to an unknown label");
    r.mapping[ascii_lower(trim(raw))] = *label;
  }
  if (r.mapping.empty()) throw ConfigError("collapse rule is empty");
  return r;
}

json CollapseRule::to_json() const {
  json j = json::object();
  for (const auto& [raw, l] : mapping) j[raw] = to_string(l);
  return j;
}

Label CollapseRule::apply(std::string_view raw) const {
  auto it = mapping.find(ascii_lower(trim(raw)));
  if (it == mapping.end()) {
    throw Error("raw label '" + trim(raw) + "' is not covered by the collapse rule");
  }
  return it->second;
}

TaskSchema TaskSchema::from_json(const json& j) {
  TaskSchema s;
  s.id = j.value("id", s.id);
  s.text = j.value("text", s.text);
  s.label = j.value("label", s.label);
  const std::string d = j.value("delimiter", std::string(1, s.delimiter));
  if (d == "\\t" || d == "tab") s.delimiter = '\t';
  else if (d.size() == 1) s.delimiter = d[0];
  else throw ConfigError("task schema: delimiter must be a single character");
  return s;
}

json TaskSchema::to_json() const {
  return {{"id", id}, {"text", text}, {"label", label}, {"delimiter", std::string(1, delimiter)}};
}

double TaskDataset::hateful_fraction() const {
  return examples.empty() ? 0.0
                          : static_cast<double>(class_counts[class_index(Label::Hateful)]) /
                                static_cast<double>(examples.size());
}

TaskDataset make_task_dataset(std::string name, std::vector<TaskExample> examples) {
  TaskDataset d;
  d.name = std::move(name);
  std::set<std::string, std::less<>> seen;
  for (const auto& e : examples) {
    if (!seen.insert(e.example_id).second) {
      throw Error(d.name + ": duplicate example id '" + e.example_id + "'");
    }
    ++d.class_counts[class_index(e.label)];
  }
  d.examples = std::move(examples);
  return d;
}

TaskDataset load_task_dataset(const std::filesystem::path& path, const CollapseRule& collapse,
                              const TaskSchema& schema, std::string name) {
  const csv::Table table = csv::read_file(path, schema.delimiter);
  const auto c_text = table.column(schema.text);
  const auto c_label = table.column(schema.label);
  if (!c_text) throw Error(path.string() + ": missing text column '" + schema.text + "'");
  if (!c_label) throw Error(path.string() + ": missing label column '" + schema.label + "'");
  const auto c_id = table.column(schema.id);

  std::vector<TaskExample> examples;
  examples.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size()) {
      throw Error(path.string() + " line " + std::to_string(table.line_numbers[r]) +
                  ": field count mismatch");
    }
    TaskExample e;
    e.example_id = c_id ? trim(row[*c_id]) : std::to_string(r);
    e.text = row[*c_text];
    try {
      e.label = collapse.apply(row[*c_label]);
    } catch (const Error& err) {
      throw Error(path.string() + " line " + std::to_string(table.line_numbers[r]) + ": " +
                  err.what());
    }
    examples.push_back(std::move(e));
  }
  if (examples.empty()) throw Error(path.string() + ": empty dataset");
  if (name.empty()) name = path.stem().string();
  return make_task_dataset(std::move(name), std::move(examples));
}

namespace {

void split_positions(std::vector<std::size_t> pos, const std::array<double, 3>& ratios, Rng& rng,
                     TaskSplits& out) {
  rng.shuffle(std::span<std::size_t>(pos));
  const auto n = static_cast<double>(pos.size());
  const auto n_train = static_cast<std::size_t>(std::floor(ratios[0] * n + 1e-9));
  const auto n_val = std::min(pos.size() - n_train,
                              static_cast<std::size_t>(std::floor(ratios[1] * n + 1e-9)));
  out.train.insert(out.train.end(), pos.begin(), pos.begin() + n_train);
  out.validation.insert(out.validation.end(), pos.begin() + n_train,
                        pos.begin() + n_train + n_val);
  out.test.insert(out.test.end(), pos.begin() + n_train + n_val, pos.end());
}

}  // namespace

TaskSplits split_task(const TaskDataset& dataset, std::array<double, 3> ratios,
                      std::uint64_t seed, bool stratified) {
  if (dataset.examples.empty()) throw Error("split_task: empty dataset");
  for (double r : ratios) {
    if (!(r >= 0.0)) throw ConfigError("split_task: ratios must be non-negative");
  }
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9) {
    throw ConfigError("split_task: ratios must sum to 1");
  }
  TaskSplits out;
  out.seed = seed;
  Rng rng(derive_seed(seed, "task-split", dataset.name));
  if (!stratified) {
    std::vector<std::size_t> pos(dataset.size());
    std::iota(pos.begin(), pos.end(), std::size_t{0});
    split_positions(std::move(pos), ratios, rng, out);
    return out;
  }
  for (Label l : {Label::NonHateful, Label::Hateful}) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.examples[i].label == l) pos.push_back(i);
    }
    split_positions(std::move(pos), ratios, rng, out);
  }
  return out;
}

std::pair<TaskDataset, TaskSplits> join_presplit(std::string name, const TaskDataset& train,
                                                 const TaskDataset& validation,
                                                 const TaskDataset& test) {
  std::vector<TaskExample> all;
  TaskSplits splits;
  for (auto [part, dst] : {std::pair{&train, &splits.train}, std::pair{&validation, &splits.validation},
                           std::pair{&test, &splits.test}}) {
    for (const auto& e : part->examples) {
      dst->push_back(all.size());
      all.push_back(e);
    }
  }
  return {make_task_dataset(std::move(name), std::move(all)), std::move(splits)};
}

std::vector<TaskExample> select(const TaskDataset& dataset, const std::vector<std::size_t>& pos) {
  std::vector<TaskExample> out;
  out.reserve(pos.size());
  for (auto i : pos) out.push_back(dataset.examples.at(i));
  return out;
}

}  // namespace behave
