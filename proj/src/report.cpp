#include "behave/report.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "behave/csv.hpp"

namespace behave {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) { return json(v).dump(); }

std::string pct(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f%%", v * 100.0);
  return buf;
}

std::string counts(const Fraction& f) {
  return std::to_string(f.numerator) + "/" + std::to_string(f.denominator);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << content;
  if (!out) throw Error("write failed: " + path.string());
}

std::string csv_text(const std::vector<csv::Row>& rows) {
  std::ostringstream out;
  for (const auto& r : rows) csv::write_row(out, r);
  return out.str();
}

const AggregateReport* aggregate_for(const ConfigurationResult& c, Axis axis) {
  for (const auto& a : c.aggregates) {
    if (a.axis == axis) return &a;
  }
  return nullptr;
}

}  // namespace

std::string format_p_value(double p) {
  if (p < 0.001) return "<.001";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", p);
  std::string s = buf;
  if (s.rfind("0.", 0) == 0) s.erase(0, 1);
  return s;
}

json significance_table(const ExperimentReport& report) {
  json rows = json::array();
  for (const auto& s : report.significance) {
    rows.push_back({{"compared_approaches", s.spec.a + " and " + s.spec.b},
                    {"test_set", s.spec.test_set},
                    {"metric", to_string(s.spec.metric)},
                    {"p_value", s.result.p_value},
                    {"method", s.result.to_json()["method"]},
                    {"n", s.result.sample_size},
                    {"significant", s.significant}});
  }
  return rows;
}

namespace {

std::string test_set_label(const std::string& t) {
  if (t == "All") return "All test set";
  if (t == "FuncOut" || t == "IdentOut" || t == "ClassOut") return t + " held-out test set";
  return t + " test set";
}

std::vector<csv::Row> fig2_rows(const ExperimentReport& r) {
  std::vector<csv::Row> rows{{"configuration", "mode", "accuracy", "correct", "total"}};
  for (const auto& c : r.configurations) {
    if (!c.all_split) continue;
    rows.push_back({c.name, std::string(to_string(c.mode)), num(c.all_split->value()),
                    std::to_string(c.all_split->numerator),
                    std::to_string(c.all_split->denominator)});
  }
  return rows;
}

std::vector<csv::Row> fig3_rows(const ExperimentReport& r) {
  std::vector<csv::Row> rows{
      {"configuration", "scheme", "measure", "value", "correct", "total", "plans"}};
  for (const auto& c : r.configurations) {
    if (c.mode == TrainingMode::TaskOnly) continue;
    for (const auto& a : c.aggregates) {
      Fraction pooled;
      for (const auto& k : a.per_key) {
        pooled.numerator += k.covered.numerator;
        pooled.denominator += k.covered.denominator;
      }
      const std::string scheme(scheme_name(a.axis));
      rows.push_back({c.name, scheme, "covered", num(a.mean_covered_accuracy),
                      std::to_string(pooled.numerator), std::to_string(pooled.denominator),
                      std::to_string(a.plans)});
      rows.push_back({c.name, scheme, "held-out", num(a.heldout_union_accuracy.value()),
                      std::to_string(a.heldout_union_accuracy.numerator),
                      std::to_string(a.heldout_union_accuracy.denominator),
                      std::to_string(a.plans)});
    }
  }
  return rows;
}

std::vector<csv::Row> fig4_rows(const ExperimentReport& r) {
  std::vector<csv::Row> rows{{"scheme", "before", "before_accuracy", "before_correct",
                              "before_total", "after", "after_accuracy", "after_correct",
                              "after_total"}};
  for (auto axis : {Axis::Functionality, Axis::Identity, Axis::Class}) {
    for (const auto& before : r.configurations) {
      if (before.mode != TrainingMode::TaskOnly) continue;
      const auto* after = r.find(before.name + "-" + std::string(scheme_name(axis)));
      if (!after) continue;
      const auto* ab = aggregate_for(before, axis);
      const auto* aa = aggregate_for(*after, axis);
      if (!ab || !aa) continue;
      rows.push_back({std::string(scheme_name(axis)), before.name,
                      num(ab->heldout_union_accuracy.value()),
                      std::to_string(ab->heldout_union_accuracy.numerator),
                      std::to_string(ab->heldout_union_accuracy.denominator), after->name,
                      num(aa->heldout_union_accuracy.value()),
                      std::to_string(aa->heldout_union_accuracy.numerator),
                      std::to_string(aa->heldout_union_accuracy.denominator)});
    }
  }
  return rows;
}

std::vector<csv::Row> fig5_rows(const ExperimentReport& r) {
  std::vector<csv::Row> rows{{"configuration", "test_set", "macro_f1", "micro_f1", "n"}};
  for (const auto& c : r.configurations) {
    for (const auto& [t, f] : c.task_test) {
      rows.push_back({c.name, t, num(f.macro), num(f.micro), std::to_string(f.confusion.total())});
    }
  }
  return rows;
}

std::vector<csv::Row> significance_rows(const ExperimentReport& r) {
  std::vector<csv::Row> rows{{"compared_approaches", "test_set", "metric", "p_value"}};
  for (const auto& s : r.significance) {
    rows.push_back({s.spec.a + " and " + s.spec.b, test_set_label(s.spec.test_set),
                    std::string(to_string(s.spec.metric)), num(s.result.p_value)});
  }
  return rows;
}

std::vector<csv::Row> delta_rows(const DeltaTable& d) {
  std::vector<csv::Row> rows{
      {"category", "rank", "id", "text", "gold_label", "p_before", "p_after", "delta"}};
  for (std::size_t ci = 0; ci < 4; ++ci) {
    for (std::size_t k = 0; k < d.top[ci].size(); ++k) {
      const auto& rec = d.records[d.top[ci][k]];
      auto it = d.texts.find(rec.id);
      rows.push_back({std::string(to_string(kExtremeCategories[ci])), std::to_string(k + 1), rec.id,
                      it == d.texts.end() ? "" : it->second, std::string(to_string(rec.gold)),
                      num(rec.p_before), num(rec.p_after), num(rec.delta)});
    }
  }
  return rows;
}

std::string md_escape(std::string s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n' || c == '\r') out += ' ';
    else out += c;
  }
  return out;
}

}  // namespace

std::string render_markdown(const ExperimentReport& r) {
  std::ostringstream md;
  md << "# Behaviour-aware learning report\n\n";
  md << "Status: " << (r.failure ? "failed" : "complete") << "\n\n";
  const auto& p = r.provenance;
  if (p.contains("master_seed")) md << "Master seed: " << p["master_seed"].dump() << "\n\n";
  if (r.failure) {
    md << "Failure in configuration `" << r.failure->configuration << "`";
    if (!r.failure->plan.empty()) md << " (" << r.failure->plan << ")";
    md << ": " << md_escape(r.failure->message) << "\n\n";
  }
  if (p.contains("suite")) {
    md << "Suite: " << p["suite"]["cases"].dump() << " cases, "
       << p["suite"]["functionalities"].dump() << " functionalities, "
       << p["suite"]["classes"].dump() << " classes, " << p["suite"]["identities"].dump()
       << " identities.\n\n";
  }
  if (p.contains("tasks") && !p["tasks"].empty()) {
    md << "| Task | Examples | Hateful | Train | Validation | Test |\n|---|---|---|---|---|---|\n";
    for (const auto& t : p["tasks"]) {
      md << "| " << t["name"].get<std::string>() << " | " << t["examples"].dump() << " | "
         << t["hateful"].dump() << " | " << t["train"].dump() << " | " << t["validation"].dump()
         << " | " << t["test"].dump() << " |\n";
    }
    md << "\n";
  }

  const auto f2 = fig2_rows(r);
  if (f2.size() > 1) {
    md << "## All split test accuracy\n\n| Configuration | Mode | Accuracy | Correct/Total |\n"
          "|---|---|---|---|\n";
    for (std::size_t i = 1; i < f2.size(); ++i) {
      const auto* c = r.find(f2[i][0]);
      md << "| " << c->name << " | " << to_string(c->mode) << " | " << pct(c->all_split->value())
         << " | " << counts(*c->all_split) << " |\n";
    }
    md << "\n";
  }

  bool any_agg = false;
  for (const auto& c : r.configurations) any_agg = any_agg || (!c.aggregates.empty() && c.mode != TrainingMode::TaskOnly);
  if (any_agg) {
    md << "## Covered vs held-out accuracy\n\n| Configuration | Scheme | Plans | Covered (mean) | "
          "Held-out (union) | Held-out correct/total | Gap |\n|---|---|---|---|---|---|---|\n";
    for (const auto& c : r.configurations) {
      if (c.mode == TrainingMode::TaskOnly) continue;
      for (const auto& a : c.aggregates) {
        md << "| " << c.name << " | " << scheme_name(a.axis) << " | " << a.plans << " | "
           << pct(a.mean_covered_accuracy) << " | " << pct(a.heldout_union_accuracy.value())
           << " | " << counts(a.heldout_union_accuracy) << " | " << pct(a.gap()) << " |\n";
      }
    }
    md << "\n";
  }

  const auto f4 = fig4_rows(r);
  if (f4.size() > 1) {
    md << "## Held-out accuracy before and after suite fine-tuning\n\n| Scheme | Before | "
          "Accuracy | After | Accuracy |\n|---|---|---|---|---|\n";
    for (std::size_t i = 1; i < f4.size(); ++i) {
      const auto& row = f4[i];
      md << "| " << row[0] << " | " << row[1] << " | " << pct(std::stod(row[2])) << " ("
         << row[3] << "/" << row[4] << ") | " << row[5] << " | " << pct(std::stod(row[6])) << " ("
         << row[7] << "/" << row[8] << ") |\n";
    }
    md << "\n";
  }

  const auto f5 = fig5_rows(r);
  if (f5.size() > 1) {
    md << "## Task test sets\n\n| Configuration | Test set | Macro F1 | Micro F1 | n |\n"
          "|---|---|---|---|---|\n";
    for (const auto& c : r.configurations) {
      for (const auto& [t, f] : c.task_test) {
        md << "| " << c.name << " | " << t << " | " << pct(f.macro) << " | " << pct(f.micro)
           << " | " << f.confusion.total() << " |\n";
      }
    }
    md << "\n";
  }

  if (!r.significance.empty()) {
    md << "## Significance tests\n\n| Compared approaches | Test set | Evaluation metric | p-value "
          "|\n|---|---|---|---|\n";
    for (const auto& s : r.significance) {
      md << "| " << s.spec.a << " and " << s.spec.b << " | " << test_set_label(s.spec.test_set)
         << " | " << (s.spec.metric == Metric::Accuracy ? "Accuracy" : "Macro F1 score") << " | "
         << format_p_value(s.result.p_value) << " |\n";
    }
    md << "\n";
  }

  for (const auto& d : r.deltas) {
    md << "## Prediction change on " << d.task << " (" << d.before << " to " << d.after
       << ")\n\n| Category | Sample | Gold label | p_before | p_after |\n|---|---|---|---|---|\n";
    for (std::size_t ci = 0; ci < 4; ++ci) {
      for (auto pos : d.top[ci]) {
        const auto& rec = d.records[pos];
        auto it = d.texts.find(rec.id);
        md << "| " << to_string(kExtremeCategories[ci]) << " | "
           << md_escape(it == d.texts.end() ? rec.id : it->second) << " | " << to_string(rec.gold)
           << " | " << pct(rec.p_before) << " | " << pct(rec.p_after) << " |\n";
      }
    }
    md << "\n";
  }

  if (!r.notes.empty()) {
    md << "## Notes\n\n";
    for (const auto& n : r.notes) md << "- " << n << "\n";
    md << "\n";
  }
  return md.str();
}

std::vector<std::string> emit_report(const ExperimentReport& report, const fs::path& dir,
                                     const EmitOptions& options, const json& run_info) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
  std::vector<std::string> files;
  std::vector<std::string> notes = report.notes;
  auto put = [&](const std::string& name, const std::string& content) {
    write_file(dir / name, content);
    files.push_back(name);
  };
  if (options.json) {
    put("report.json", report.body().dump(2) + "\n");
    if (!report.significance.empty()) put("significance.json", significance_table(report).dump(2) + "\n");
  }
  if (options.markdown) put("report.md", render_markdown(report));
  if (options.csv) {
    const std::pair<const char*, std::vector<csv::Row>> figs[] = {
        {"fig2_all_split.csv", fig2_rows(report)},
        {"fig3_covered_heldout.csv", fig3_rows(report)},
        {"fig4_heldout_change.csv", fig4_rows(report)},
        {"fig5_task_test.csv", fig5_rows(report)}};
    for (const auto& [name, rows] : figs) {
      if (rows.size() > 1) put(name, csv_text(rows));
    }
    if (!report.significance.empty()) put("significance.csv", csv_text(significance_rows(report)));
    for (const auto& d : report.deltas) put("delta_p_" + file_stem(d.task) + ".csv", csv_text(delta_rows(d)));
  }
  json manifest = run_info;
  manifest["status"] = report.failure ? "failed" : "complete";
  manifest["report_body"] = options.json ? json("report.json") : json(nullptr);
  manifest["files"] = files;
  manifest["notes"] = notes;
  manifest["significance_table"] = report.significance.empty() ? "omitted" : "significance.csv";
  if (report.failure) {
    manifest["failure"] = {{"configuration", report.failure->configuration},
                           {"plan", report.failure->plan},
                           {"message", report.failure->message},
                           {"completed_configurations", report.configurations.size()}};
  }
  write_file(dir / "manifest.json", manifest.dump(2) + "\n");
  files.push_back("manifest.json");
  return files;
}

// ---------------------------------------------------------------------------
// Verification

namespace {

json read_json(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(p.string() + ": " + e.what());
  }
}

GoldLabels read_gold(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  GoldLabels g;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto j = json::parse(line);
    const auto l = parse_label(j.at("label").get<std::string>());
    if (!l) throw Error(p.string() + ": bad label");
    g.emplace_back(j.at("id").get<std::string>(), *l);
  }
  return g;
}

Axis axis_of_scheme(const std::string& s) {
  for (auto a : {Axis::None, Axis::Functionality, Axis::Identity, Axis::Class}) {
    if (scheme_name(a) == s) return a;
  }
  throw Error("unknown scheme " + s);
}

TrainingMode mode_of(const std::string& s) {
  for (auto m : {TrainingMode::TaskOnly, TrainingMode::SuiteOnly, TrainingMode::Sequential}) {
    if (to_string(m) == s) return m;
  }
  throw Error("unknown mode " + s);
}

}  // namespace

VerifyResult verify_report(const fs::path& dir) {
  VerifyResult v;
  const json body = read_json(dir / "report.json");
  auto check = [&](bool ok, const std::string& what) {
    ++v.checked;
    if (!ok) v.mismatches.push_back(what);
  };

  ExperimentReport rep;
  const auto& art = body.at("artifacts");
  std::optional<TestSuite> suite;
  if (art.contains("suite")) suite = suite_from_json(read_json(dir / art["suite"].get<std::string>()));
  if (art.contains("plans")) {
    for (const auto& [scheme, rel] : art["plans"].items()) {
      std::vector<SplitPlan> plans;
      for (const auto& p : read_json(dir / rel.get<std::string>())) plans.push_back(SplitPlan::from_json(p));
      if (suite) {
        for (const auto& p : plans) {
          check(check_plan(p, *suite).empty(), "plan " + p.name() + " fails partition/purity checks");
        }
      }
      rep.plans.emplace(scheme, std::move(plans));
    }
  }
  std::map<std::string, GoldLabels, std::less<>> task_gold;
  if (art.contains("task_gold")) {
    for (const auto& [task, rel] : art["task_gold"].items()) {
      task_gold.emplace(task, read_gold(dir / rel.get<std::string>()));
    }
  }

  for (const auto& cj : body.at("configurations")) {
    ConfigurationResult c;
    c.name = cj.at("name").get<std::string>();
    c.mode = mode_of(cj.at("mode").get<std::string>());
    if (!cj.at("task").is_null()) c.task = cj["task"].get<std::string>();
    if (!cj.at("scheme").is_null()) c.scheme = axis_of_scheme(cj["scheme"].get<std::string>());
    for (const auto& [key, rel] : cj.at("prediction_files").items()) {
      auto preds = load_external_predictions(dir / rel.get<std::string>());
      if (key == "suite") c.suite_predictions = std::move(preds);
      else if (key.rfind("plan:", 0) == 0) c.plan_predictions.emplace(key.substr(5), std::move(preds));
      else if (key.rfind("task:", 0) == 0) c.task_predictions.emplace(key.substr(5), std::move(preds));
    }
    const std::string where = "configuration " + c.name;

    // Per-plan evaluations and aggregates.
    if (suite) {
      std::map<std::string, std::vector<PlanEval>, std::less<>> by_scheme;
      for (const auto& [scheme, plans] : rep.plans) {
        if (c.scheme && scheme_name(*c.scheme) != scheme) continue;
        for (const auto& plan : plans) {
          const auto& preds = c.scheme ? c.plan_predictions.at(plan.name()) : *c.suite_predictions;
          by_scheme[scheme].push_back(evaluate_plan(preds, plan, *suite));
        }
      }
      if (c.scheme) {
        const auto& evals = by_scheme[std::string(scheme_name(*c.scheme))];
        const auto& pj = cj.at("plans");
        check(pj.size() == evals.size(), where + ": plan count");
        for (std::size_t i = 0; i < evals.size() && i < pj.size(); ++i) {
          json expect = evals[i].to_json();
          json got = pj[i];
          for (const auto* k : {"hyperparameters", "validation_loss", "predictions"}) got.erase(k);
          check(expect == got, where + ": plan " + evals[i].plan + " evaluation");
        }
      }
      for (const auto& [scheme, evals] : by_scheme) {
        if (scheme == "All") {
          check(cj.contains("all_split_accuracy") &&
                    cj["all_split_accuracy"] == fraction_json(evals.front().full_test_accuracy),
                where + ": All split accuracy");
          continue;
        }
        const auto agg = aggregate_holdout(evals).to_json();
        bool found = false;
        for (const auto& a : cj.at("heldout_aggregates")) {
          if (a.at("scheme") == scheme) found = a == agg;
        }
        check(found, where + ": " + scheme + " aggregate");
      }
    }
    // Task test scores.
    for (const auto& tj : cj.at("task_test")) {
      const auto t = tj.at("test_set").get<std::string>();
      auto g = task_gold.find(t);
      if (g == task_gold.end() || !c.task_predictions.contains(t)) {
        check(false, where + ": missing inputs for task test " + t);
        continue;
      }
      const auto f = f1_scores(align_covering(c.task_predictions.at(t), g->second));
      json expect = f.to_json();
      expect["test_set"] = t;
      expect["n"] = f.confusion.total();
      check(expect == tj, where + ": task test " + t);
    }
    rep.configurations.push_back(std::move(c));
  }

  // Significance.
  const auto& prov = body.at("provenance");
  SignificanceConfig sig;
  if (prov.contains("significance")) {
    const auto& s = prov["significance"];
    sig.alpha = s.at("alpha").get<double>();
    sig.iterations = s.at("iterations").get<std::int64_t>();
    sig.rule = s.at("two_sided") == "double-tail" ? TwoSidedRule::DoubleTail : TwoSidedRule::MinLikelihood;
    sig.one_sample = s.at("binomial") == "one-sample";
  }
  const std::uint64_t seed = prov.value("master_seed", std::uint64_t{0});
  for (const auto& sj : body.at("significance")) {
    ComparisonSpec spec;
    spec.a = sj.at("a").get<std::string>();
    spec.b = sj.at("b").get<std::string>();
    spec.test_set = sj.at("test_set").get<std::string>();
    spec.metric = sj.at("metric") == "accuracy" ? Metric::Accuracy : Metric::MacroF1;
    const auto row = run_comparison(rep, spec, sig, seed, suite ? &*suite : nullptr, task_gold);
    check(row.to_json() == sj, "significance " + spec.a + " vs " + spec.b + " on " + spec.test_set);
  }

  // Prediction change tables.
  for (const auto& dj : body.at("delta_p")) {
    const auto task = dj.at("task").get<std::string>();
    const auto* before = rep.find(dj.at("before").get<std::string>());
    const auto* after = rep.find(dj.at("after").get<std::string>());
    if (!before || !after || !task_gold.contains(task)) {
      check(false, "delta_p " + task + ": missing inputs");
      continue;
    }
    DeltaTable d;
    d.task = task;
    d.before = before->name;
    d.after = after->name;
    d.records = delta_p(before->task_predictions.at(task), after->task_predictions.at(task),
                        task_gold.at(task));
    std::size_t k = 0;
    for (const auto& [cat, rows] : dj.at("extremes").items()) k = std::max(k, rows.size());
    d.top = top_k_extremes(d.records, std::max<std::size_t>(k, 1));
    json expect = d.to_json();
    json got = dj;
    for (auto& [cat, rows] : got["extremes"].items()) {
      for (auto& row : rows) row.erase("text");
    }
    for (auto& [cat, rows] : expect["extremes"].items()) {
      for (auto& row : rows) row.erase("text");
    }
    check(expect == got, "delta_p " + task);
  }
  return v;
}

}  // namespace behave
