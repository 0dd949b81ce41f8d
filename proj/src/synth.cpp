#include "behave/synth.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include "behave/csv.hpp"

namespace behave {

std::vector<std::string> expand_alternatives(std::string_view pattern) {
  std::vector<std::string> out{""};
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] != '{') {
      const std::size_t j = std::min(pattern.find('{', i), pattern.size());
      for (auto& s : out) s.append(pattern.substr(i, j - i));
      i = j;
      continue;
    }
    const std::size_t close = pattern.find('}', i);
    if (close == std::string_view::npos) throw Error("unterminated '{' in pattern");
    std::vector<std::string_view> choices;
    std::size_t start = i + 1;
    for (std::size_t k = start; k <= close; ++k) {
      if (k == close || pattern[k] == '|') {
        choices.push_back(pattern.substr(start, k - start));
        start = k + 1;
      }
    }
    std::vector<std::string> next;
    next.reserve(out.size() * choices.size());
    for (const auto& s : out) {
      for (auto c : choices) next.push_back(s + std::string(c));
    }
    out = std::move(next);
    i = close + 1;
  }
  return out;
}

namespace {

constexpr std::array<const char*, 7> kIdentitySurface = {
    "women", "trans people", "gay people", "black people", "disabled people", "Muslims",
    "immigrants"};

constexpr std::array<const char*, 7> kSlurs = {"vrenks", "zorbies", "quelps", "drizzocks",
                                               "plonts", "murfs",   "skevs"};

std::string replace_all(std::string s, std::string_view from, std::string_view to) {
  for (std::size_t p = s.find(from); p != std::string::npos; p = s.find(from, p + to.size())) {
    s.replace(p, from.size(), to);
  }
  return s;
}

std::string fill(const std::string& tmpl, std::size_t ident) {
  std::string s = replace_all(tmpl, "<ID>", kIdentitySurface[ident]);
  s = replace_all(s, "<SLUR>", kSlurs[ident]);
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

struct FunctionalityTemplates {
  const char* id;
  bool uses_identity;
  std::vector<const char*> patterns;
};

// Hateful cores that the spelling-variation functionalities perturb. The
// keyword is the token the perturbation applies to.
struct SpellingBase {
  const char* prefix;
  const char* keyword;
  const char* suffix;
};

const std::vector<SpellingBase>& spelling_bases() {
  static const std::vector<SpellingBase> bases = {
      {"I ", "hate", " <ID>."},          {"I ", "despise", " <ID>."},
      {"I ", "detest", " <ID>."},        {"I really ", "hate", " <ID>."},
      {"<ID> are ", "disgusting", "."},  {"<ID> are ", "worthless", "."},
      {"<ID> are ", "vermin", "."},      {"<ID> are ", "pathetic", "."},
      {"<ID> are ", "scum", "."},        {"All <ID> should ", "die", "."},
      {"<ID> are ", "filthy", " animals."}, {"I ", "loathe", " all <ID>."},
      {"Kill all ", "<ID>", "."},        {"<ID> are ", "parasites", "."},
      {"I can't stand ", "<ID>", "."},   {"<ID> are a ", "plague", "."},
      {"Death to ", "<ID>", "."},        {"<ID> are ", "disgusting", " animals."},
      {"I ", "hate", " all <ID>."},      {"<ID> are ", "subhuman", "."},
      {"<ID> are ", "worthless", " trash."}, {"Get rid of ", "<ID>", "."},
      {"<ID> are ", "garbage", "."},     {"I ", "hate", " <ID> so much."},
      {"<ID> make me ", "sick", "."},
  };
  return bases;
}

const std::vector<FunctionalityTemplates>& hatecheck_templates() {
  static const std::vector<FunctionalityTemplates> t = {
      {"F1", true,
       {"I {really |truly |absolutely |}{hate|despise|detest|loathe|can't stand|am disgusted by} "
        "<ID>{.|!| so much.| more than anything.}"}},
      {"F2", true,
       {"<ID> are {so |really |totally |}{disgusting|pathetic|worthless|vile|filthy|stupid|repulsive}"
        "{.| to the core.| and always will be.}"}},
      {"F3", true,
       {"<ID> are {nothing but |just |}{vermin|rats|parasites|a plague|animals|scum|garbage}"
        "{.| to me.| in this society.}"}},
      {"F4", true,
       {"<ID> {belong in a zoo|should stay out of sight|are a burden on everyone|ruin every "
        "neighbourhood they move into|can't be trusted with anything|bring nothing but crime|are "
        "all the same}{.| honestly.| if you ask me.}"}},
      {"F5", true,
       {"I {am going to|will|want to} {hurt|kill|attack|beat up|get rid of|destroy} "
        "{all |those |}<ID>{.| soon.| one day.}"}},
      {"F6", true,
       {"<ID> {should|deserve to|ought to|need to} {be killed|be hurt|be wiped out|suffer|be "
        "beaten|be executed}{.| all of them.| without exception.}"}},
      {"F7", true,
       {"{You are|They are|All of them are|Those people are} {just |nothing but |}<SLUR>"
        "{.|!| and everyone knows it.}"}},
      {"F8", false,
       {"The {vrenks|zorbies|quelps|plonts|murfs} in my garden {are blooming|look great|need "
        "water}{.|!}",
        "We had {quelps|drizzocks|skevs} for dinner {tonight|yesterday}{.|!}"}},
      {"F9", false,
       {"{We|Us} {vrenks|zorbies|quelps|drizzocks|plonts|murfs|skevs} {are proud|stick "
        "together|are here to stay|have each other's backs}{.|!| forever.}"}},
      {"F10", true,
       {"{Fucking|Damn|Bloody} <ID> are {useless|disgusting|pathetic|worthless}{.|!| as always.}",
        "{Fuck|Screw} all <ID>{.|!}"}},
      {"F11", false,
       {"{Fuck|Damn|Shit|Holy shit|Bloody hell}, {this weather is awful|I missed the bus "
        "again|that concert was amazing|I forgot my keys|the game was brilliant}{.|!| today.| "
        "lol.| again.}"}},
      {"F12", true,
       {"I {met|saw|know} {some|a few|many} <ID> {and|but} they {are|were} {all |}{disgusting|"
        "vermin|worthless|pathetic}{.|!}"}},
      {"F13", true,
       {"{<ID> keep asking for rights|<ID> live in my city|<ID> are everywhere now|I see <ID> "
        "every day}. {They are|All of them are|Every one of them is} {sick|disgusting|a "
        "plague|worthless}{.|!}"}},
      {"F14", true,
       {"<ID> are {never|not|absolutely not|in no way} {valuable|welcome here|intelligent|decent "
        "people|equal to us|worth anything}{.|!}"}},
      {"F15", true,
       {"<ID> are {not|never|absolutely not|in no way} {disgusting|vermin|worthless|a "
        "plague|stupid|a burden}{.|!}"}},
      {"F16", true,
       {"Why are <ID> {so |always |}{disgusting|worthless|stupid|inferior|pathetic}?",
        "{Isn't it obvious that|Don't you agree that|Wouldn't you say} <ID> are "
        "{disgusting|worthless|vermin|inferior}?"}},
      {"F17", true,
       {"I {think|believe|feel|am convinced} that <ID> are {disgusting|worthless|vermin|"
        "inferior|pathetic}{.| honestly.| to be fair.}"}},
      {"F18", true,
       {"{I|We|My friends} {live with|work with|met|talked to|know} {many|some|a lot of} <ID>"
        "{.| in my town.| at work.}",
        "<ID> {live in|are part of} {every|our} {city|community}{.| too.}"}},
      {"F19", true,
       {"I {love|admire|respect|really like} <ID>{.|!| so much.}",
        "<ID> are {wonderful|brilliant|amazing|kind|strong}{.|!| and I am proud of them.}",
        "{We need more|I am grateful for|Thank goodness for} <ID> {in this world|in my "
        "life|here}{.|!}"}},
      {"F20", true,
       {"Saying \"{I hate <ID>|<ID> are vermin|<ID> are worthless|<ID> should die}\" is {so "
        "wrong|not okay|just hateful|unacceptable}{.|!}",
        "\"{I hate <ID>|<ID> are vermin|<ID> are disgusting}\"? {That is|That's} {disgusting|not "
        "okay|hateful} of you{.|!}",
        "If you write \"{<ID> are scum|kill all <ID>|<ID> are animals}\" you {are the "
        "problem|should be ashamed}{.|!}"}},
      {"F21", true,
       {"{Your|This|That} {statement|tweet|comment} about <ID> {is|was} {hateful|disgusting|"
        "unacceptable|bigoted}{.|!}",
        "You {should be ashamed of|need to stop} {hating|insulting|attacking} <ID>{.|!}"}},
      {"F22", false,
       {"I {really |}{hate|despise|can't stand} {my phone|this printer|Mondays|traffic|this "
        "weather|my laptop|this song|broccoli}{.|!| so much.}"}},
      {"F23", false,
       {"{You are|My neighbour is|That guy is|My boss is} {such a|a total|a complete} "
        "{idiot|disgrace|loser|waste of space}{.|!}"}},
      {"F24", false,
       {"{Lawyers|Bankers|Politicians|Landlords|Journalists|Tourists|Cyclists|Influencers} are "
        "{disgusting|vermin|worthless|a plague|so stupid}{.|!}"}},
  };
  return t;
}

std::string swap_adjacent(const std::string& w, std::size_t at) {
  std::string s = w;
  if (s.size() >= 2) std::swap(s[at % (s.size() - 1)], s[at % (s.size() - 1) + 1]);
  return s;
}

std::string delete_char(const std::string& w, std::size_t at) {
  std::string s = w;
  if (s.size() >= 2) s.erase(1 + at % (s.size() - 1), 1);
  return s;
}

std::string spaced(const std::string& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += ' ';
    s += w[i];
  }
  return s;
}

std::string leet(const std::string& w) {
  std::string s = w;
  for (auto& ch : s) {
    switch (ch) {
      case 'a': ch = '4'; break;
      case 'e': ch = '3'; break;
      case 'i': ch = '1'; break;
      case 'o': ch = '0'; break;
      case 's': ch = '5'; break;
      case 't': ch = '7'; break;
      default: break;
    }
  }
  return s;
}

// Renders a spelling-variation case from a base core.
std::string spelling_case(const std::string& func, const SpellingBase& b, std::size_t ident,
                          std::size_t variant) {
  std::string keyword = replace_all(b.keyword, "<ID>", kIdentitySurface[ident]);
  std::string prefix = fill(b.prefix, ident);
  std::string suffix = replace_all(b.suffix, "<ID>", kIdentitySurface[ident]);
  if (func == "F25") keyword = swap_adjacent(keyword, variant);
  else if (func == "F26") keyword = delete_char(keyword, variant);
  else if (func == "F28") keyword = spaced(keyword);
  else if (func == "F29") keyword = leet(keyword);
  if (func == "F27") {
    // Word boundary removed on one side of the keyword.
    if (variant % 2 == 0 && !prefix.empty() && prefix.back() == ' ') prefix.pop_back();
    else if (!suffix.empty() && suffix.front() == ' ') suffix.erase(0, 1);
    else if (!prefix.empty() && prefix.back() == ' ') prefix.pop_back();
  }
  std::string s = prefix + keyword + suffix;
  if (!s.empty() && s[0] >= 'a' && s[0] <= 'z') s[0] = static_cast<char>(s[0] - 'a' + 'A');
  return s;
}

}  // namespace

TestSuite synth_hatecheck(std::uint64_t seed) {
  const Taxonomy tax = Taxonomy::hatecheck();
  const auto& idents = tax.identities();
  std::vector<TestCase> cases;
  std::size_t next_id = 1;
  std::size_t next_template = 1;

  auto push = [&](const FunctionalitySpec& f, std::string text,
                  std::optional<std::size_t> ident, std::size_t templ) {
    TestCase c;
    c.case_id = std::to_string(next_id++);
    c.text = std::move(text);
    c.gold = f.expected_label;
    c.functionality = f.id;
    if (ident) c.identity = idents[*ident];
    c.template_id = std::to_string(templ);
    cases.push_back(std::move(c));
  };

  const auto& templates = hatecheck_templates();
  for (const auto& f : tax.functionalities()) {
    Rng rng(derive_seed(seed, "synth-hatecheck", f.id));
    const std::size_t n = f.expected_count;
    auto tit = std::find_if(templates.begin(), templates.end(),
                            [&](const auto& t) { return f.id == t.id; });
    if (tit == templates.end()) {
      // Spelling variations: perturbed hateful cores, one identity per case.
      const auto& bases = spelling_bases();
      std::vector<std::size_t> order(bases.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng.shuffle(std::span<std::size_t>(order));
      const std::size_t first_template = next_template;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t base = order[(i / idents.size()) % order.size()];
        const std::size_t ident = i % idents.size();
        push(f, spelling_case(f.id, bases[base], ident, rng.below(16)), ident,
             first_template + i / idents.size());
      }
      next_template = first_template + (n + idents.size() - 1) / idents.size();
      continue;
    }
    std::vector<std::string> pool;
    for (const auto* p : tit->patterns) {
      auto e = expand_alternatives(p);
      pool.insert(pool.end(), e.begin(), e.end());
    }
    rng.shuffle(std::span<std::string>(pool));
    const std::size_t per_template = tit->uses_identity ? idents.size() : 1;
    const std::size_t needed = (n + per_template - 1) / per_template;
    if (pool.size() < needed) {
      throw Error("synth: functionality " + f.id + " has too few templates");
    }
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t t = i / per_template;
      if (tit->uses_identity) {
        const std::size_t ident = i % idents.size();
        push(f, fill(pool[t], ident), ident, next_template + t);
      } else {
        push(f, fill(pool[t], 0), std::nullopt, next_template + t);
      }
    }
    next_template += needed;
  }
  return TestSuite(std::move(cases), tax);
}

void write_hatecheck_csv(const TestSuite& suite, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  csv::write_row(out, {"case_id", "functionality", "test_case", "label_gold", "target_ident",
                       "templ_id"});
  for (const auto& c : suite.cases()) {
    const auto& f = suite.taxonomy().at(c.functionality);
    const std::string func = f.aliases.empty() ? f.id : f.aliases.front();
    csv::write_row(out, {c.case_id, func, c.text, std::string(to_string(c.gold)),
                         c.identity.value_or(""), c.template_id.value_or("")});
  }
}

// ---------------------------------------------------------------------------
// Task corpora

namespace {

template <typename T, std::size_t N>
const T& pick(Rng& rng, const std::array<T, N>& items) {
  return items[rng.below(N)];
}

constexpr std::array<const char*, 7> kTaskIdentity = {
    "women", "trans people", "gays", "blacks", "the disabled", "muslims", "immigrants"};

std::string decorate(Rng& rng, std::string core) {
  if (rng.uniform() < 0.25) core = "RT @user" + std::to_string(rng.below(9000) + 100) + ": " + core;
  else if (rng.uniform() < 0.3) core = "@user" + std::to_string(rng.below(9000) + 100) + " " + core;
  const double r = rng.uniform();
  static constexpr std::array<const char*, 8> tails = {" lol", " smh", " #mondays", " #truth",
                                                       " :)", " lmao", " #facts", " haha"};
  if (r < 0.3) core += pick(rng, tails);
  else if (r < 0.4) core += " http://t.co/" + std::to_string(rng.below(900000) + 100000);
  return core;
}

std::string neutral_tweet(Rng& rng) {
  static constexpr std::array<const char*, 12> subj = {
      "just", "finally", "really", "honestly", "cant believe i", "about to", "i", "we",
      "my sister", "everyone", "my dad", "my friends"};
  static constexpr std::array<const char*, 12> verb = {
      "watched", "finished", "started", "loved", "missed", "cooked", "bought", "found",
      "planned", "enjoyed", "fixed", "booked"};
  static constexpr std::array<const char*, 16> obj = {
      "the game", "my coffee", "this show", "the new album", "work", "a road trip",
      "the playoffs", "dinner", "my homework", "the concert", "a new phone", "the weekend",
      "breakfast", "the movie", "my garden", "the match"};
  static constexpr std::array<const char*, 8> when = {"today", "tonight", "again", "this morning",
                                                      "", "already", "yesterday", "finally"};
  std::string s = std::string(pick(rng, subj)) + " " + pick(rng, verb) + " " + pick(rng, obj);
  const std::string w = pick(rng, when);
  if (!w.empty()) s += " " + w;
  if (rng.uniform() < 0.08) {
    static constexpr std::array<const char*, 4> pos = {"so proud of my", "shoutout to all the",
                                                       "great talk with", "respect to"};
    s = std::string(pick(rng, pos)) + " " + pick(rng, kTaskIdentity) + " " + pick(rng, obj);
  }
  return s;
}

std::string offensive_tweet(Rng& rng) {
  static constexpr std::array<const char*, 10> insult = {
      "bitch", "hoe", "idiot", "loser", "clown", "dumbass", "trash", "bum", "jerk", "fool"};
  static constexpr std::array<const char*, 6> prof = {"shit", "damn", "fuckin", "hell",
                                                      "crap", "ass"};
  switch (rng.below(4)) {
    case 0:
      return std::string("you a ") + pick(rng, insult) + " " + pick(rng, prof);
    case 1:
      return std::string("this ") + pick(rng, prof) + " is " +
             (rng.coin() ? "wild" : "annoying") + " " + neutral_tweet(rng);
    case 2:
      return std::string("that ") + pick(rng, insult) + " " + (rng.coin() ? "stole" : "ruined") +
             " my " + (rng.coin() ? "spot" : "day") + " " + pick(rng, prof);
    default:
      return std::string(pick(rng, prof)) + " " + neutral_tweet(rng) + " with these " +
             pick(rng, insult) + "s";
  }
}

std::string hateful_tweet(Rng& rng) {
  static constexpr std::array<const char*, 8> hate = {"trash", "animals", "disgusting",
                                                      "the worst", "subhuman", "a disease",
                                                      "vermin", "worthless"};
  const std::size_t ident = rng.below(kTaskIdentity.size());
  const std::string target = rng.uniform() < 0.3 ? kSlurs[ident] : kTaskIdentity[ident];
  switch (rng.below(4)) {
    case 0:
      return std::string(rng.coin() ? "all " : "these ") + target + " r " + pick(rng, hate);
    case 1:
      return std::string(rng.coin() ? "deport" : "get rid of") + " all the " + target + " " +
             (rng.coin() ? "now" : "already");
    case 2:
      return std::string("i ") + (rng.coin() ? "hate" : "cant stand") + " " + target +
             (rng.coin() ? " so much" : "");
    default:
      return std::string("fuckin ") + target + " everywhere, " + pick(rng, hate);
  }
}

std::string spam_tweet(Rng& rng) {
  static constexpr std::array<const char*, 4> act = {"win", "get", "claim", "grab"};
  static constexpr std::array<const char*, 4> item = {"free followers", "a cheap iphone",
                                                      "a gift card", "bitcoin"};
  return std::string(pick(rng, act)) + " " + pick(rng, item) + " " +
         (rng.coin() ? "now" : "today") + " http://t.co/" + std::to_string(rng.below(900000));
}

}  // namespace

std::vector<RawTaskRow> synth_task_corpus(const TaskCorpusSpec& spec, std::uint64_t seed) {
  if (spec.size == 0) throw ConfigError("synthetic task corpus: size must be positive");
  if (!(spec.hateful_rate > 0.0 && spec.hateful_rate < 1.0)) {
    throw ConfigError("synthetic task corpus: hateful_rate must lie in (0, 1)");
  }
  Rng rng(derive_seed(seed, "synth-task", spec.name));
  std::vector<RawTaskRow> rows;
  rows.reserve(spec.size);
  const auto n_hate = static_cast<std::size_t>(spec.hateful_rate * static_cast<double>(spec.size));
  for (std::size_t i = 0; i < spec.size; ++i) {
    RawTaskRow r;
    r.id = std::to_string(i);
    const bool hateful = i < n_hate;
    if (spec.style == TaskStyle::Davidson) {
      const double u = rng.uniform();
      if (hateful) {
        r.text = hateful_tweet(rng);
        r.label = "0";
      } else if (u < 0.82) {
        r.text = offensive_tweet(rng);
        r.label = "1";
      } else {
        r.text = neutral_tweet(rng);
        r.label = "2";
      }
    } else {
      const double u = rng.uniform();
      if (hateful) {
        r.text = hateful_tweet(rng);
        r.label = "hateful";
      } else if (u < 0.29) {
        r.text = offensive_tweet(rng);
        r.label = "abusive";
      } else if (u < 0.44) {
        r.text = spam_tweet(rng);
        r.label = "spam";
      } else {
        r.text = neutral_tweet(rng);
        r.label = "normal";
      }
    }
    r.text = decorate(rng, r.text);
    rows.push_back(std::move(r));
  }
  // Interleave classes so file order carries no label information.
  rng.shuffle(std::span<RawTaskRow>(rows));
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].id = std::to_string(i);
  return rows;
}

TaskSchema task_schema_for(TaskStyle style) {
  TaskSchema s;
  s.id = "id";
  s.text = "tweet";
  s.label = style == TaskStyle::Davidson ? "class" : "label";
  return s;
}

CollapseRule collapse_rule_for(TaskStyle style) {
  CollapseRule r;
  if (style == TaskStyle::Davidson) {
    r.mapping = {{"0", Label::Hateful}, {"1", Label::NonHateful}, {"2", Label::NonHateful}};
  } else {
    r.mapping = {{"hateful", Label::Hateful},
                 {"abusive", Label::NonHateful},
                 {"spam", Label::NonHateful},
                 {"normal", Label::NonHateful}};
  }
  return r;
}

void write_task_csv(const TaskCorpusSpec& spec, const std::vector<RawTaskRow>& rows,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const auto schema = task_schema_for(spec.style);
  csv::write_row(out, {schema.id, schema.text, schema.label});
  for (const auto& r : rows) csv::write_row(out, {r.id, r.text, r.label});
}

// ---------------------------------------------------------------------------
// Random property-test suites

TestSuite random_suite(Rng& rng, const RandomSuiteSpec& spec) {
  const std::size_t n_func =
      spec.min_functionalities +
      rng.below(spec.max_functionalities - spec.min_functionalities + 1);
  const std::size_t max_cls = std::min(spec.max_classes, n_func);
  const std::size_t n_cls = spec.min_classes + rng.below(max_cls - spec.min_classes + 1);
  const std::size_t n_ident = rng.below(spec.max_identities + 1);

  std::vector<std::string> classes;
  for (std::size_t i = 0; i < n_cls; ++i) classes.push_back("class" + std::to_string(i + 1));
  std::vector<std::string> identities;
  for (std::size_t i = 0; i < n_ident; ++i) identities.push_back("group" + std::to_string(i + 1));
  std::vector<FunctionalitySpec> funcs;
  for (std::size_t i = 0; i < n_func; ++i) {
    FunctionalitySpec f;
    f.id = "F" + std::to_string(i + 1);
    f.class_id = classes[i < n_cls ? i : rng.below(n_cls)];
    f.expected_label = rng.coin() ? Label::Hateful : Label::NonHateful;
    funcs.push_back(std::move(f));
  }
  const std::size_t n_cases = n_func + rng.below(spec.max_cases - n_func + 1);
  std::vector<TestCase> cases;
  for (std::size_t i = 0; i < n_cases; ++i) {
    TestCase c;
    c.case_id = "c" + std::to_string(i);
    const std::size_t f = i < n_func ? i : rng.below(n_func);
    c.functionality = funcs[f].id;
    c.gold = rng.uniform() < 0.9 ? funcs[f].expected_label
                                 : (rng.coin() ? Label::Hateful : Label::NonHateful);
    if (n_ident > 0 && rng.coin()) c.identity = identities[rng.below(n_ident)];
    c.text = "case " + std::to_string(i);
    cases.push_back(std::move(c));
  }
  // Spread the coverage cases so functionality order is not positional.
  rng.shuffle(std::span<TestCase>(cases));
  return TestSuite(std::move(cases), Taxonomy(std::move(funcs), std::move(classes),
                                              std::move(identities)));
}

}  // namespace behave
