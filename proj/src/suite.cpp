#include "behave/suite.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "behave/csv.hpp"

namespace behave {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Taxonomy

Taxonomy::Taxonomy(std::vector<FunctionalitySpec> functionalities, std::vector<std::string> classes,
                   std::vector<std::string> identities)
    : functionalities_(std::move(functionalities)),
      classes_(std::move(classes)),
      identities_(std::move(identities)) {
  const std::set<std::string, std::less<>> class_set(classes_.begin(), classes_.end());
  if (class_set.size() != classes_.size()) throw ConfigError("taxonomy: duplicate class id");
  for (std::size_t i = 0; i < functionalities_.size(); ++i) {
    const auto& f = functionalities_[i];
    if (f.id.empty()) throw ConfigError("taxonomy: empty functionality id");
    if (!class_set.contains(f.class_id)) {
      throw ConfigError("taxonomy: functionality " + f.id + " maps to unknown class '" +
                        f.class_id + "'");
    }
    auto add = [&](const std::string& key) {
      auto [it, inserted] = lookup_.emplace(ascii_lower(key), i);
      if (!inserted && it->second != i) {
        throw ConfigError("taxonomy: identifier '" + key + "' used by two functionalities");
      }
    };
    if (lookup_.contains(ascii_lower(f.id)) && lookup_.at(ascii_lower(f.id)) != i) {
      throw ConfigError("taxonomy: duplicate functionality id " + f.id);
    }
    add(f.id);
    for (const auto& a : f.aliases) add(a);
  }
  for (auto& ident : identities_) ident = ascii_lower(trim(ident));
}

const FunctionalitySpec* Taxonomy::find(std::string_view id_or_alias) const {
  auto it = lookup_.find(ascii_lower(trim(id_or_alias)));
  return it == lookup_.end() ? nullptr : &functionalities_[it->second];
}

const FunctionalitySpec& Taxonomy::at(std::string_view id) const {
  const auto* f = find(id);
  if (!f) throw Error("unknown functionality '" + std::string(id) + "'");
  return *f;
}

bool operator==(const FunctionalitySpec& a, const FunctionalitySpec& b) {
  return a.id == b.id && a.class_id == b.class_id && a.expected_label == b.expected_label &&
         a.expected_count == b.expected_count && a.description == b.description &&
         a.aliases == b.aliases;
}

bool operator==(const Taxonomy& a, const Taxonomy& b) {
  return a.functionalities_ == b.functionalities_ && a.classes_ == b.classes_ &&
         a.identities_ == b.identities_;
}

Taxonomy Taxonomy::hatecheck() {
  struct Row {
    const char* id;
    const char* cls;
    Label label;
    std::size_t n;
    const char* alias;
    const char* description;
  };
  constexpr auto H = Label::Hateful;
  constexpr auto N = Label::NonHateful;
  static const Row rows[] = {
      {"F1", "derogation", H, 140, "derog_neg_emote_h", "Expression of strong negative emotions (explicit)"},
      {"F2", "derogation", H, 140, "derog_neg_attrib_h", "Description using very negative attributes (explicit)"},
      {"F3", "derogation", H, 140, "derog_dehum_h", "Dehumanisation (explicit)"},
      {"F4", "derogation", H, 140, "derog_impl_h", "Implicit derogation"},
      {"F5", "threatening_language", H, 133, "threat_dir_h", "Direct threat"},
      {"F6", "threatening_language", H, 140, "threat_norm_h", "Threat as normative statement"},
      {"F7", "slur_usage", H, 144, "slur_h", "Hate expressed using slur"},
      {"F8", "slur_usage", N, 30, "slur_homonym_nh", "Non-hateful homonyms of slurs"},
      {"F9", "slur_usage", N, 81, "slur_reclaimed_nh", "Reclaimed slurs"},
      {"F10", "profanity_usage", H, 140, "profanity_h", "Hate expressed using profanity"},
      {"F11", "profanity_usage", N, 100, "profanity_nh", "Non-hateful use of profanity"},
      {"F12", "pronoun_reference", H, 140, "ref_subs_clause_h", "Hate expressed through reference in subsequent clauses"},
      {"F13", "pronoun_reference", H, 133, "ref_subs_sent_h", "Hate expressed through reference in subsequent sentences"},
      {"F14", "negation", H, 140, "negate_pos_h", "Hate expressed using negated positive statement"},
      {"F15", "negation", N, 133, "negate_neg_nh", "Non-hate expressed using negated hateful statement"},
      {"F16", "phrasing", H, 140, "phrase_question_h", "Hate phrased as a question"},
      {"F17", "phrasing", H, 133, "phrase_opinion_h", "Hate phrased as an opinion"},
      {"F18", "non_hate_group_identity", N, 126, "ident_neutral_nh", "Neutral statements using protected group identifiers"},
      {"F19", "non_hate_group_identity", N, 189, "ident_pos_nh", "Positive statements using protected group identifiers"},
      {"F20", "counter_speech", N, 173, "counter_quote_nh", "Denouncements of hate that quote it"},
      {"F21", "counter_speech", N, 141, "counter_ref_nh", "Denouncements of hate that make direct reference to it"},
      {"F22", "abuse_non_protected_targets", N, 65, "target_obj_nh", "Abuse targeted at objects"},
      {"F23", "abuse_non_protected_targets", N, 65, "target_indiv_nh", "Abuse targeted at individuals (not as member of a protected group)"},
      {"F24", "abuse_non_protected_targets", N, 62, "target_group_nh", "Abuse targeted at non-protected groups (e.g. professions)"},
      {"F25", "spelling_variations", H, 133, "spell_char_swap_h", "Swaps of adjacent characters"},
      {"F26", "spelling_variations", H, 140, "spell_char_del_h", "Missing characters"},
      {"F27", "spelling_variations", H, 141, "spell_space_del_h", "Missing word boundaries"},
      {"F28", "spelling_variations", H, 173, "spell_space_add_h", "Added spaces between chars"},
      {"F29", "spelling_variations", H, 173, "spell_leet_h", "Leet speak spellings"},
  };
  std::vector<FunctionalitySpec> funcs;
  for (const auto& r : rows) {
    funcs.push_back({r.id, r.cls, r.label, r.n, r.description, {r.alias}});
  }
  return Taxonomy(std::move(funcs),
                  {"derogation", "threatening_language", "slur_usage", "profanity_usage",
                   "pronoun_reference", "negation", "phrasing", "non_hate_group_identity",
                   "counter_speech", "abuse_non_protected_targets", "spelling_variations"},
                  {"women", "trans people", "gay people", "black people", "disabled people",
                   "muslims", "immigrants"});
}

Taxonomy Taxonomy::from_json(const json& j) {
  try {
    std::vector<FunctionalitySpec> funcs;
    for (const auto& f : j.at("functionalities")) {
      FunctionalitySpec spec;
      spec.id = f.at("id").get<std::string>();
      spec.class_id = f.at("class").get<std::string>();
      const auto label = parse_label(f.at("label").get<std::string>());
      if (!label) throw ConfigError("taxonomy: bad label for " + spec.id);
      spec.expected_label = *label;
      spec.expected_count = f.value("n", std::size_t{0});
      spec.description = f.value("description", std::string{});
      spec.aliases = f.value("aliases", std::vector<std::string>{});
      funcs.push_back(std::move(spec));
    }
    return Taxonomy(std::move(funcs), j.at("classes").get<std::vector<std::string>>(),
                    j.value("identities", std::vector<std::string>{}));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("taxonomy: ") + e.what());
  }
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open taxonomy " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw ConfigError("taxonomy " + path.string() + ": " + e.what());
  }
}

json Taxonomy::to_json() const {
  json funcs = json::array();
  for (const auto& f : functionalities_) {
    funcs.push_back({{"id", f.id},
                     {"class", f.class_id},
                     {"label", to_string(f.expected_label)},
                     {"n", f.expected_count},
                     {"description", f.description},
                     {"aliases", f.aliases}});
  }
  return {{"functionalities", funcs}, {"classes", classes_}, {"identities", identities_}};
}

// ---------------------------------------------------------------------------
// TestSuite

TestSuite::TestSuite(std::vector<TestCase> cases, Taxonomy taxonomy)
    : cases_(std::move(cases)), taxonomy_(std::move(taxonomy)) {
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    auto& c = cases_[i];
    const auto* f = taxonomy_.find(c.functionality);
    if (!f) throw Error("case " + c.case_id + ": unknown functionality '" + c.functionality + "'");
    c.functionality = f->id;
    if (!by_id_.emplace(c.case_id, i).second) throw Error("duplicate case_id '" + c.case_id + "'");
  }
  build_indexes(by_func_, by_class_, by_ident_);
}

void TestSuite::build_indexes(Index& by_func, Index& by_class, Index& by_ident) const {
  for (std::size_t i = 0; i < cases_.size(); ++i) {
    const auto& c = cases_[i];
    by_func[c.functionality].push_back(i);
    by_class[class_of(c)].push_back(i);
    if (c.identity) by_ident[*c.identity].push_back(i);
  }
}

bool TestSuite::indexes_consistent() const {
  Index f, c, d;
  build_indexes(f, c, d);
  if (f != by_func_ || c != by_class_ || d != by_ident_) return false;
  for (const auto& [key, members] : by_func_) {
    for (auto i : members) {
      if (cases_[i].functionality != key) return false;
    }
  }
  return true;
}

const TestCase* TestSuite::find(std::string_view case_id) const {
  auto it = by_id_.find(case_id);
  return it == by_id_.end() ? nullptr : &cases_[it->second];
}

const std::string& TestSuite::class_of(const TestCase& c) const {
  return taxonomy_.at(c.functionality).class_id;
}

std::optional<std::string> TestSuite::key_of(const TestCase& c, Axis axis) const {
  switch (axis) {
    case Axis::Functionality: return c.functionality;
    case Axis::Class: return class_of(c);
    case Axis::Identity: return c.identity;
    case Axis::None: return std::nullopt;
  }
  return std::nullopt;
}

const TestSuite::Index& TestSuite::index(Axis axis) const {
  switch (axis) {
    case Axis::Functionality: return by_func_;
    case Axis::Class: return by_class_;
    case Axis::Identity: return by_ident_;
    case Axis::None: break;
  }
  throw Error("no index for axis none");
}

std::vector<std::string> TestSuite::keys(Axis axis) const {
  std::vector<std::string> out;
  const auto& idx = index(axis);
  auto take = [&](const std::string& k) {
    if (idx.contains(k) && std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  };
  switch (axis) {
    case Axis::Functionality:
      for (const auto& f : taxonomy_.functionalities()) take(f.id);
      break;
    case Axis::Class:
      for (const auto& c : taxonomy_.classes()) take(c);
      break;
    case Axis::Identity:
      for (const auto& i : taxonomy_.identities()) take(i);
      for (const auto& c : cases_) {
        if (c.identity) take(*c.identity);
      }
      break;
    case Axis::None: break;
  }
  return out;
}

bool operator==(const TestSuite& a, const TestSuite& b) {
  return a.cases_ == b.cases_ && a.taxonomy_ == b.taxonomy_ && a.by_func_ == b.by_func_ &&
         a.by_class_ == b.by_class_ && a.by_ident_ == b.by_ident_;
}

// ---------------------------------------------------------------------------
// Schema

SuiteSchema SuiteSchema::parse(std::string_view text) {
  SuiteSchema s;
  auto assign = [&](const std::string& key, const std::string& value) {
    if (key == "case_id") s.case_id = value;
    else if (key == "text") s.text = value;
    else if (key == "label" || key == "gold_label") s.label = value;
    else if (key == "functionality") s.functionality = value;
    else if (key == "identity" || key == "target_identity") s.identity = value;
    else if (key == "template_id" || key == "template") s.template_id = value;
    else if (key == "delimiter") {
      if (value == "\\t" || value == "tab") s.delimiter = '\t';
      else if (value.size() == 1) s.delimiter = value[0];
      else throw ConfigError("schema: delimiter must be a single character");
    } else throw ConfigError("schema: unknown key '" + key + "'");
  };

  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    try {
      const json j = json::parse(body);
      for (const auto& [k, v] : j.items()) {
        if (k == "null_tokens") {
          s.null_tokens.clear();
          for (const auto& t : v) s.null_tokens.push_back(ascii_lower(trim(t.get<std::string>())));
        } else {
          assign(k, v.get<std::string>());
        }
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("schema: ") + e.what());
    }
    return s;
  }

  std::istringstream in{std::string(body)};
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError("schema: expected key=value, got '" + t + "'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key == "null_tokens") {
      s.null_tokens.clear();
      std::istringstream parts(value);
      std::string tok;
      while (std::getline(parts, tok, '|')) s.null_tokens.push_back(ascii_lower(trim(tok)));
    } else {
      assign(key, value);
    }
  }
  return s;
}

SuiteSchema SuiteSchema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

json SuiteSchema::to_json() const {
  return {{"case_id", case_id},
          {"text", text},
          {"label", label},
          {"functionality", functionality},
          {"identity", identity},
          {"template_id", template_id},
          {"delimiter", std::string(1, delimiter)},
          {"null_tokens", null_tokens}};
}

std::string normalize_identity(std::string_view raw) {
  return ascii_lower(trim(raw));
}

// ---------------------------------------------------------------------------
// Loading

namespace {

TestSuite from_table(const csv::Table& table, const SuiteSchema& schema, const Taxonomy& taxonomy,
                     std::string_view source) {
  auto required = [&](const std::string& name, const char* field) {
    auto col = table.column(name);
    if (!col) {
      throw Error(std::string(source) + ": missing required column '" + name + "' (" + field + ")");
    }
    return *col;
  };
  const auto c_id = required(schema.case_id, "case_id");
  const auto c_text = required(schema.text, "text");
  const auto c_label = required(schema.label, "gold label");
  const auto c_func = required(schema.functionality, "functionality");
  const auto c_ident = required(schema.identity, "target identity");
  const auto c_templ = table.column(schema.template_id);

  std::vector<TestCase> cases;
  cases.reserve(table.rows.size());
  std::set<std::string, std::less<>> seen;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where =
        std::string(source) + " row " + std::to_string(r + 1) + " (line " +
        std::to_string(table.line_numbers[r]) + ")";
    if (row.size() != table.header.size()) {
      throw Error(where + ": expected " + std::to_string(table.header.size()) + " fields, got " +
                  std::to_string(row.size()));
    }
    TestCase c;
    c.case_id = trim(row[c_id]);
    if (c.case_id.empty()) throw Error(where + ": empty case_id");
    if (!seen.insert(c.case_id).second) throw Error(where + ": duplicate case_id '" + c.case_id + "'");
    c.text = row[c_text];
    const auto label = parse_label(row[c_label]);
    if (!label) throw Error(where + ": unparseable label '" + row[c_label] + "'");
    c.gold = *label;
    const auto* f = taxonomy.find(row[c_func]);
    if (!f) throw Error(where + ": unknown functionality '" + row[c_func] + "'");
    c.functionality = f->id;
    const std::string ident = normalize_identity(row[c_ident]);
    if (std::find(schema.null_tokens.begin(), schema.null_tokens.end(), ident) ==
        schema.null_tokens.end()) {
      c.identity = ident;
    }
    if (c_templ) {
      const std::string t = trim(row[*c_templ]);
      if (!t.empty()) c.template_id = t;
    }
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k == c_id || k == c_text || k == c_label || k == c_func || k == c_ident ||
          (c_templ && k == *c_templ)) {
        continue;
      }
      c.extra.emplace_back(table.header[k], row[k]);
    }
    cases.push_back(std::move(c));
  }
  if (cases.empty()) throw Error(std::string(source) + ": no cases");
  return TestSuite(std::move(cases), taxonomy);
}

}  // namespace

TestSuite parse_suite(std::string_view data, const SuiteSchema& schema, const Taxonomy& taxonomy,
                      std::string_view source) {
  std::istringstream in{std::string(data)};
  csv::Table table;
  try {
    table = csv::read(in, schema.delimiter);
  } catch (const Error& e) {
    throw Error(std::string(source) + ": " + e.what());
  }
  return from_table(table, schema, taxonomy, source);
}

TestSuite load_suite(const std::filesystem::path& path, const SuiteSchema& schema,
                     const Taxonomy& taxonomy) {
  if (!std::filesystem::exists(path)) throw Error("suite file not found: " + path.string());
  if (path.extension() == ".json") {
    std::ifstream in(path);
    try {
      return suite_from_json(json::parse(in));
    } catch (const json::exception& e) {
      throw Error(path.string() + ": " + e.what());
    }
  }
  csv::Table table;
  try {
    table = csv::read_file(path, schema.delimiter);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return from_table(table, schema, taxonomy, path.string());
}

json suite_to_json(const TestSuite& suite) {
  json cases = json::array();
  for (const auto& c : suite.cases()) {
    json extra = json::array();
    for (const auto& [k, v] : c.extra) extra.push_back({k, v});
    cases.push_back({{"case_id", c.case_id},
                     {"text", c.text},
                     {"gold_label", to_string(c.gold)},
                     {"functionality", c.functionality},
                     {"target_identity", c.identity ? json(*c.identity) : json(nullptr)},
                     {"template_id", c.template_id ? json(*c.template_id) : json(nullptr)},
                     {"extra", extra}});
  }
  return {{"format", "behave-suite/1"}, {"taxonomy", suite.taxonomy().to_json()}, {"cases", cases}};
}

TestSuite suite_from_json(const json& j) {
  if (j.value("format", std::string{}) != "behave-suite/1") {
    throw Error("suite json: unsupported format tag");
  }
  Taxonomy taxonomy = Taxonomy::from_json(j.at("taxonomy"));
  std::vector<TestCase> cases;
  for (const auto& o : j.at("cases")) {
    TestCase c;
    c.case_id = o.at("case_id").get<std::string>();
    c.text = o.at("text").get<std::string>();
    const auto label = parse_label(o.at("gold_label").get<std::string>());
    if (!label) throw Error("suite json: bad gold_label for " + c.case_id);
    c.gold = *label;
    c.functionality = o.at("functionality").get<std::string>();
    if (!o.at("target_identity").is_null()) c.identity = o["target_identity"].get<std::string>();
    if (o.contains("template_id") && !o["template_id"].is_null()) {
      c.template_id = o["template_id"].get<std::string>();
    }
    for (const auto& kv : o.value("extra", json::array())) {
      c.extra.emplace_back(kv.at(0).get<std::string>(), kv.at(1).get<std::string>());
    }
    cases.push_back(std::move(c));
  }
  if (cases.empty()) throw Error("suite json: no cases");
  return TestSuite(std::move(cases), std::move(taxonomy));
}

void write_suite_csv(const TestSuite& suite, const std::filesystem::path& path,
                     const SuiteSchema& schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  csv::Row header{schema.case_id, schema.text, schema.label, schema.functionality, schema.identity,
                  schema.template_id};
  if (!suite.cases().empty()) {
    for (const auto& [k, v] : suite.cases().front().extra) header.push_back(k);
  }
  csv::write_row(out, header, schema.delimiter);
  for (const auto& c : suite.cases()) {
    csv::Row row{c.case_id,
                 c.text,
                 std::string(to_string(c.gold)),
                 c.functionality,
                 c.identity.value_or(""),
                 c.template_id.value_or("")};
    for (const auto& [k, v] : c.extra) row.push_back(v);
    csv::write_row(out, row, schema.delimiter);
  }
}

// ---------------------------------------------------------------------------
// Validation

std::size_t ValidationReport::count_mismatches() const {
  return static_cast<std::size_t>(std::count_if(
      counts.begin(), counts.end(), [](const CountCheck& c) { return c.expected != c.actual; }));
}

json ValidationReport::to_json() const {
  json j;
  j["total_cases"] = total_cases;
  j["expected_total"] = expected_total;
  json cs = json::array();
  for (const auto& c : counts) {
    cs.push_back({{"functionality", c.functionality}, {"expected", c.expected}, {"actual", c.actual}});
  }
  j["counts"] = cs;
  json lv = json::array();
  for (const auto& v : label_violations) {
    lv.push_back({{"case_id", v.case_id},
                  {"functionality", v.functionality},
                  {"expected", to_string(v.expected)},
                  {"actual", to_string(v.actual)}});
  }
  j["label_violations"] = lv;
  json ic = json::array();
  for (const auto& [ident, n] : identity_coverage) ic.push_back({{"identity", ident}, {"cases", n}});
  j["identity_coverage"] = ic;
  j["cases_without_identity"] = cases_without_identity;
  j["warnings"] = warnings;
  return j;
}

ValidationReport validate_suite(const TestSuite& suite) {
  ValidationReport r;
  r.total_cases = suite.size();
  const auto& tax = suite.taxonomy();
  const auto& by_func = suite.index(Axis::Functionality);
  for (const auto& f : tax.functionalities()) {
    r.expected_total += f.expected_count;
    auto it = by_func.find(f.id);
    const std::size_t actual = it == by_func.end() ? 0 : it->second.size();
    r.counts.push_back({f.id, f.expected_count, actual});
    if (actual != f.expected_count) {
      r.warnings.push_back("count mismatch for " + f.id + ": expected " +
                           std::to_string(f.expected_count) + ", got " + std::to_string(actual));
    }
  }
  if (r.total_cases != r.expected_total) {
    r.warnings.push_back("total case count " + std::to_string(r.total_cases) + " differs from " +
                         std::to_string(r.expected_total));
  }
  for (const auto& c : suite.cases()) {
    const auto& f = tax.at(c.functionality);
    if (c.gold != f.expected_label) {
      r.label_violations.push_back({c.case_id, f.id, f.expected_label, c.gold});
      r.warnings.push_back("label inconsistency: case " + c.case_id + " in " + f.id + " is " +
                           std::string(to_string(c.gold)) + ", expected " +
                           std::string(to_string(f.expected_label)));
    }
    if (!c.identity) ++r.cases_without_identity;
  }
  const auto& by_ident = suite.index(Axis::Identity);
  for (const auto& ident : suite.keys(Axis::Identity)) {
    r.identity_coverage.emplace_back(ident, by_ident.at(ident).size());
    if (std::find(tax.identities().begin(), tax.identities().end(), ident) ==
        tax.identities().end()) {
      r.warnings.push_back("identity '" + ident + "' is not in the taxonomy");
    }
  }
  for (const auto& ident : tax.identities()) {
    if (!by_ident.contains(ident)) r.warnings.push_back("identity '" + ident + "' has no cases");
  }
  return r;
}

}  // namespace behave
