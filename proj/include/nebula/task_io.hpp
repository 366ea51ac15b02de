#pragma once

// Text format for tasks. Four sections, `facts` first:
//
//   facts
//     on(d1,d2) clear(d1) ...
//   operator move(d1,d2,p2)
//     pre on(d1,d2) clear(d1) clear(p2)
//     add on(d1,p2) clear(d2)
//     del on(d1,d2) clear(p2)
//   init
//     on(d1,d2) ...
//   goal
//     clear(d2)
//
// Tokens are whitespace-separated, `#` starts a comment, a line whose first
// token is not a directive continues the list opened by the previous one.
// Names match [A-Za-z0-9_()-]+.

#include <algorithm>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "nebula/task.hpp"

namespace nebula {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
          c == '(' || c == ')' || c == ',' || c == '-'))
      return false;
  }
  return true;
}

inline std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::string cur;
  for (char c : line) {
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) toks.push_back(std::move(cur)), cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) toks.push_back(std::move(cur));
  return toks;
}

}  // namespace detail

inline Task parse_task(const std::string& text) {
  enum class Section { None, Facts, Pre, Add, Del, Init, Goal };

  Task task;
  std::unordered_map<std::string, FactId> fact_ids;
  Section section = Section::None;
  bool have_init = false, have_goal = false;
  std::vector<FactId> init_facts, goal_facts;

  auto resolve = [&](const std::string& name, int line) {
    auto it = fact_ids.find(name);
    if (it == fact_ids.end())
      throw ParseError(line, "unknown fact '" + name + "'");
    return it->second;
  };

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    auto toks = detail::tokenize(raw);
    if (toks.empty()) continue;

    const std::string& head = toks[0];
    size_t first_name = 0;

    if (head == "facts") {
      section = Section::Facts;
      first_name = 1;
    } else if (head == "operator") {
      if (task.fact_names.empty())
        throw ParseError(line_no, "'operator' before 'facts'");
      if (toks.size() != 2)
        throw ParseError(line_no, "'operator' expects exactly one name");
      if (!detail::valid_name(toks[1]))
        throw ParseError(line_no, "invalid operator name '" + toks[1] + "'");
      task.operators.push_back(Operator{});
      task.operators.back().name = toks[1];
      section = Section::Pre;  // lists start with `pre` by convention
      continue;
    } else if (head == "pre" || head == "add" || head == "del") {
      if (task.operators.empty())
        throw ParseError(line_no, "'" + head + "' outside an operator");
      section = head == "pre"   ? Section::Pre
                : head == "add" ? Section::Add
                                : Section::Del;
      first_name = 1;
    } else if (head == "init") {
      if (task.fact_names.empty())
        throw ParseError(line_no, "'init' before 'facts'");
      section = Section::Init;
      have_init = true;
      first_name = 1;
    } else if (head == "goal") {
      if (task.fact_names.empty())
        throw ParseError(line_no, "'goal' before 'facts'");
      section = Section::Goal;
      have_goal = true;
      first_name = 1;
    } else if (section == Section::None) {
      throw ParseError(line_no, "expected a section directive, got '" + head +
                                    "'");
    }

    for (size_t i = first_name; i < toks.size(); ++i) {
      const std::string& name = toks[i];
      if (!detail::valid_name(name))
        throw ParseError(line_no, "invalid name '" + name + "'");
      switch (section) {
        case Section::Facts: {
          if (fact_ids.count(name))
            throw ParseError(line_no, "duplicate fact '" + name + "'");
          fact_ids[name] = static_cast<FactId>(task.fact_names.size());
          task.fact_names.push_back(name);
          break;
        }
        case Section::Pre:
          task.operators.back().pre.push_back(resolve(name, line_no));
          break;
        case Section::Add:
          task.operators.back().add.push_back(resolve(name, line_no));
          break;
        case Section::Del:
          task.operators.back().del.push_back(resolve(name, line_no));
          break;
        case Section::Init:
          init_facts.push_back(resolve(name, line_no));
          break;
        case Section::Goal:
          goal_facts.push_back(resolve(name, line_no));
          break;
        case Section::None:
          throw ParseError(line_no, "name outside any section");
      }
    }
  }

  if (task.fact_names.empty()) throw ParseError(line_no, "missing or empty 'facts' section");
  if (task.operators.empty()) throw ParseError(line_no, "no operators");
  if (!have_init || init_facts.empty())
    throw ParseError(line_no, "missing or empty 'init' section");
  if (!have_goal || goal_facts.empty())
    throw ParseError(line_no, "missing or empty 'goal' section");

  auto sort_unique = [](std::vector<FactId>& v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
  };
  for (auto& op : task.operators) {
    sort_unique(op.pre);
    sort_unique(op.add);
    sort_unique(op.del);
  }
  sort_unique(goal_facts);
  task.goal = std::move(goal_facts);
  task.init = State(task.num_facts());
  for (FactId f : init_facts) task.init.set(f);
  task.finalize();
  return task;
}

inline std::string serialize_task(const Task& task) {
  std::ostringstream out;
  auto names = [&](const std::vector<FactId>& ids) {
    std::string s;
    for (FactId f : ids) {
      if (!s.empty()) s += ' ';
      s += task.fact_names[f];
    }
    return s;
  };
  out << "facts\n";
  for (const auto& n : task.fact_names) out << "  " << n << "\n";
  for (const auto& op : task.operators) {
    out << "operator " << op.name << "\n";
    out << "  pre " << names(op.pre) << "\n";
    out << "  add " << names(op.add) << "\n";
    out << "  del " << names(op.del) << "\n";
  }
  out << "init\n  " << names(task.init.facts()) << "\n";
  out << "goal\n  " << names(task.goal) << "\n";
  return out.str();
}

}  // namespace nebula
