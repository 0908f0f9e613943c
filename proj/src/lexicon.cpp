#include <filesystem>
#include <fstream>
#include <sstream>

#include "irrkit/io.hpp"
#include "irrkit/sentiment.hpp"

namespace irrkit {

namespace {

LexiconSet make_builtin() {
  LexiconSet lex;
  lex.positive_terms = {
      "amazing",   "awesome",    "beautiful", "best",       "better",     "blessed",
      "blessing",  "brave",      "calm",      "celebrate",  "cheerful",   "comfort",
      "confident", "courage",    "cured",     "delighted",  "encouraging","enjoy",
      "excellent", "excited",    "fantastic", "fortunate",  "glad",       "good",
      "grateful",  "great",      "happy",     "healed",     "healthy",    "helpful",
      "hooray",    "hope",       "hopeful",   "improved",   "improving",  "joy",
      "kind",      "love",       "lovely",    "lucky",      "optimistic", "peaceful",
      "positive",  "recovered",  "relief",    "relieved",   "remission",  "strong",
      "strength",  "success",    "support",   "supportive", "thank",      "thankful",
      "thanks",    "wonderful",  "yay",       "blessings",  "smile",      "win",
  };
  lex.negative_terms = {
      "afraid",    "alone",       "angry",      "anxious",   "awful",     "bad",
      "broken",    "crying",      "depressed",  "desperate", "devastated","difficult",
      "disappointed","discouraged","exhausted", "fear",      "frightened","frustrated",
      "grief",     "hard",        "hate",       "helpless",  "hopeless",  "horrible",
      "hurt",      "lonely",      "lost",       "miserable", "nausea",    "negative",
      "nervous",   "pain",        "painful",    "poor",      "resistant", "sad",
      "scared",    "scary",       "sick",       "sorry",     "struggle",  "struggling",
      "suffering", "terrible",    "terrified",  "tired",     "upset",     "weak",
      "worried",   "worry",       "worse",      "worst",     "wrong",     "ugh",
      "numb",      "agony",       "sorrow",     "tears",     "unbearable","dread",
  };
  lex.positive_emoticons = {":)", ":-)", ":d", ":-d", ";)", ";-)", "=)", "<3", ":]", "^_^"};
  lex.negative_emoticons = {":(", ":-(", ":'(", ";(", "=(", ":[", "</3", ":/", ":-/"};
  lex.slang_terms = {"lol", "omg", "btw", "imo", "imho", "thx", "ty", "brb",
                     "idk", "hugs", "xoxo", "bff", "w/", "b4", "gr8"};
  lex.booster_terms = {{"very", 1},       {"really", 1},   {"so", 1},
                       {"extremely", 2},  {"incredibly", 2}, {"absolutely", 2},
                       {"truly", 1},      {"super", 1},    {"deeply", 1},
                       {"most", 1}};
  // Expressions related to death, verbatim; "obituar" is a stem.
  for (const char* phrase :
       {"pass away", "passing away", "passed away", "funeral", "die", "dying", "death",
        "memorial", "is gone", "was gone", "at rest", "final summons", "room temperature",
        "at peace", "in peace", "beyond the grave", "beyond the veil", "over the big ridge",
        "the last roundup", "the great majority", "the ultimate sacrifice", "a last bow",
        "last breath", "bereavement", "demise"}) {
    lex.death_terms.push_back({phrase, false});
  }
  lex.death_terms.push_back({"obituar", true});
  return lex;
}

std::set<std::string> read_term_set(const std::filesystem::path& path) {
  std::set<std::string> out;
  if (!std::filesystem::exists(path)) return out;
  for (auto& term : io::read_list(path.string())) out.insert(io::to_lower(term));
  return out;
}

void write_lines(const std::filesystem::path& path, const std::set<std::string>& terms) {
  std::ostringstream out;
  for (const auto& t : terms) out << t << '\n';
  io::write_file(path.string(), out.str());
}

}  // namespace

const LexiconSet& LexiconSet::builtin() {
  static const LexiconSet lex = make_builtin();
  return lex;
}

void LexiconSet::validate() const {
  for (const auto& t : positive_terms) {
    if (negative_terms.count(t)) {
      throw Error(ErrorCode::Validation, "term '" + t + "' is both positive and negative");
    }
  }
  auto check_lower = [](const std::string& t) {
    if (io::to_lower(t) != t) {
      throw Error(ErrorCode::Validation, "lexicon term '" + t + "' is not lowercase");
    }
  };
  for (const auto* set : {&positive_terms, &negative_terms, &positive_emoticons,
                          &negative_emoticons, &slang_terms}) {
    for (const auto& t : *set) check_lower(t);
  }
  for (const auto& [t, inc] : booster_terms) check_lower(t);
}

bool LexiconSet::is_positive(const std::string& token) const {
  return positive_terms.count(token) || positive_emoticons.count(token);
}

bool LexiconSet::is_negative(const std::string& token) const {
  return negative_terms.count(token) || negative_emoticons.count(token);
}

bool LexiconSet::is_slang(const std::string& token) const { return slang_terms.count(token) != 0; }

bool LexiconSet::is_emoticon(const std::string& token) const {
  return positive_emoticons.count(token) || negative_emoticons.count(token);
}

LexiconSet load_lexicons(const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  if (!fs::is_directory(root)) throw Error(ErrorCode::Io, "lexicon directory not found: " + dir);
  LexiconSet lex;
  lex.positive_terms = read_term_set(root / "positive.txt");
  lex.negative_terms = read_term_set(root / "negative.txt");
  lex.positive_emoticons = read_term_set(root / "positive_emoticons.txt");
  lex.negative_emoticons = read_term_set(root / "negative_emoticons.txt");
  lex.slang_terms = read_term_set(root / "slang.txt");

  if (fs::exists(root / "boosters.tsv")) {
    for (const auto& line : io::read_list((root / "boosters.tsv").string())) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) {
        throw Error(ErrorCode::Parse, "boosters.tsv: expected 'term<TAB>increment': " + line);
      }
      const auto inc = io::parse_real(io::trim(line.substr(tab + 1)));
      if (!inc) throw Error(ErrorCode::Parse, "boosters.tsv: bad increment: " + line);
      lex.booster_terms[io::to_lower(io::trim(line.substr(0, tab)))] = *inc;
    }
  }
  if (fs::exists(root / "death.txt")) {
    for (auto phrase : io::read_list((root / "death.txt").string())) {
      DeathPhrase dp;
      if (!phrase.empty() && phrase.back() == '*') {
        dp.stem = true;
        phrase.pop_back();
      }
      dp.text = io::to_lower(phrase);
      lex.death_terms.push_back(std::move(dp));
    }
  }
  if (fs::exists(root / "name_prefix.txt")) {
    auto lines = io::read_list((root / "name_prefix.txt").string());
    if (!lines.empty()) lex.name_prefix = io::to_lower(lines.front());
  }
  lex.validate();
  return lex;
}

void save_lexicons(const std::string& dir, const LexiconSet& lex) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root);
  write_lines(root / "positive.txt", lex.positive_terms);
  write_lines(root / "negative.txt", lex.negative_terms);
  write_lines(root / "positive_emoticons.txt", lex.positive_emoticons);
  write_lines(root / "negative_emoticons.txt", lex.negative_emoticons);
  write_lines(root / "slang.txt", lex.slang_terms);
  std::ostringstream boosters;
  for (const auto& [t, inc] : lex.booster_terms) boosters << t << '\t' << io::format_real(inc) << '\n';
  io::write_file((root / "boosters.tsv").string(), boosters.str());
  std::ostringstream death;
  for (const auto& d : lex.death_terms) death << d.text << (d.stem ? "*" : "") << '\n';
  io::write_file((root / "death.txt").string(), death.str());
  io::write_file((root / "name_prefix.txt").string(), lex.name_prefix + "\n");
}

}  // namespace irrkit
