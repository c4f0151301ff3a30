#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "twreg/suites.hpp"

using namespace twreg;
using json = nlohmann::ordered_json;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ZError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kKeys{"example", "z",      "weight-bound", "window", "k-max",
                                     "q-depth", "suites", "jobs",         "format", "output"};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key=value lines; '#' starts a comment; keys may use '-' or '_'.
std::map<std::string, std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::map<std::string, std::pair<std::string, std::string>> out;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    auto h = line.find('#');
    if (h != std::string::npos) line = line.substr(0, h);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    std::string where = path + ":" + std::to_string(no);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    std::string key = trim(line.substr(0, eq));
    std::replace(key.begin(), key.end(), '_', '-');
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end())
      throw ConfigError(where + ": unknown field '" + key + "'");
    out[key] = {trim(line.substr(eq + 1)), where + ": field '" + key + "'"};
  }
  return out;
}

Rat parse_rat(const std::string& v, const std::string& where) {
  try {
    return Rat::parse(trim(v));
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a rational: '" + v + "'");
  }
}

long long parse_int(const std::string& v, const std::string& where) {
  Rat r = parse_rat(v, where);
  if (!r.is_integer()) throw ConfigError(where + ": not an integer: '" + v + "'");
  return r.num64();
}

Window parse_window(const std::string& v, const std::string& where) {
  auto c = v.find(',');
  if (c == std::string::npos) {
    Rat r = parse_rat(v, where);
    if (r.sign() <= 0) throw ConfigError(where + ": window must be positive");
    return Window{-r, r};
  }
  Window w{parse_rat(v.substr(0, c), where), parse_rat(v.substr(c + 1), where)};
  if (!(w.lo < w.hi)) throw ConfigError(where + ": window needs lo < hi");
  return w;
}

std::vector<std::string> parse_suites(const std::string& v, const std::string& where) {
  if (trim(v) == "all") return suite_names();
  std::vector<std::string> out;
  std::stringstream ss(v);
  for (std::string s; std::getline(ss, s, ',');) {
    s = trim(s);
    if (s.empty()) continue;
    auto& known = suite_names();
    if (std::find(known.begin(), known.end(), s) == known.end())
      throw ConfigError(where + ": unknown suite '" + s + "'");
    if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
  }
  if (out.empty()) throw ConfigError(where + ": no suites selected");
  std::sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    auto& k = suite_names();
    return std::find(k.begin(), k.end(), a) < std::find(k.begin(), k.end(), b);
  });
  return out;
}

struct Options {
  RunConfig run;
  std::string format = "text";
  std::string output;
};

Options build(const std::map<std::string, std::pair<std::string, std::string>>& values) {
  Options o;
  for (auto& [key, vw] : values) {
    auto& [v, where] = vw;
    if (key == "example") {
      try {
        resolve_example(v);
      } catch (const std::exception& e) {
        throw ConfigError(where + ": " + e.what());
      }
      o.run.example = v;
    } else if (key == "z") {
      Rat z;
      try {
        z = Rat::parse(trim(v));
      } catch (const std::exception&) {
        throw ZError("unsupported z: '" + v + "' (z must be a nonzero rational)");
      }
      if (z.sign() == 0) throw ZError("z must be nonzero");
      o.run.z = z;
    } else if (key == "weight-bound") {
      o.run.weight_bound = parse_rat(v, where);
      if (o.run.weight_bound.sign() <= 0) throw ConfigError(where + ": weight bound must be positive");
    } else if (key == "window") {
      o.run.window = parse_window(v, where);
    } else if (key == "k-max") {
      o.run.k_max = parse_int(v, where);
      if (o.run.k_max <= 0) throw ConfigError(where + ": k-max must be positive");
    } else if (key == "q-depth") {
      o.run.q_depth = parse_rat(v, where);
      if (o.run.q_depth.sign() <= 0) throw ConfigError(where + ": q-depth must be positive");
    } else if (key == "suites") {
      o.run.suites = parse_suites(v, where);
    } else if (key == "jobs") {
      long long j = parse_int(v, where);
      if (j <= 0) throw ConfigError(where + ": jobs must be positive");
      o.run.jobs = int(j);
    } else if (key == "format") {
      if (v != "text" && v != "json") throw ConfigError(where + ": format must be text or json");
      o.format = v;
    } else if (key == "output") {
      o.output = v;
    }
  }
  return o;
}

json config_json(const Options& o) {
  json suites = json::array();
  for (auto& s : o.run.suites) suites.push_back(s);
  return json{{"example", o.run.example},
              {"z", o.run.z.str()},
              {"weight_bound", o.run.weight_bound.str()},
              {"window", o.run.window.str()},
              {"k_max", o.run.k_max},
              {"q_depth", o.run.q_depth.str()},
              {"suites", suites}};
}

struct Summary {
  long long pass = 0, fail = 0, skipped = 0;
};

Summary summarize(const std::vector<Entry>& es) {
  Summary s;
  for (auto& e : es) (e.status == "pass" ? s.pass : e.status == "fail" ? s.fail : s.skipped)++;
  return s;
}

std::string render_json(const Options& o, const std::vector<Entry>& es) {
  json entries = json::array();
  for (auto& e : es) {
    json j{{"suite", e.suite},   {"identity", e.identity}, {"anchor", e.anchor},   {"params", e.params},
           {"window", e.window}, {"status", e.status},     {"checked", e.checked}};
    if (!e.failure.empty()) j["failure"] = e.failure;
    if (!e.details.empty()) {
      json d = json::object();
      for (auto& [k, v] : e.details) d[k] = v;
      j["details"] = d;
    }
    entries.push_back(j);
  }
  auto s = summarize(es);
  json report{{"schema_version", 1},
              {"config", config_json(o)},
              {"entries", entries},
              {"summary", {{"total", es.size()}, {"pass", s.pass}, {"fail", s.fail}, {"skipped", s.skipped}}},
              {"status", s.fail ? "fail" : "pass"}};
  return report.dump(2) + "\n";
}

std::string upper(std::string s) {
  for (auto& c : s) c = char(std::toupper(c));
  return s;
}

std::string render_text(const Options& o, const std::vector<Entry>& es) {
  std::ostringstream out;
  out << "twreg report: example=" << o.run.example << " z=" << o.run.z.str() << " window=" << o.run.window.str()
      << " weight-bound=" << o.run.weight_bound.str() << " k-max=" << o.run.k_max
      << " q-depth=" << o.run.q_depth.str() << "\n";
  for (auto& e : es) {
    out << upper(e.status) << "  " << e.suite << "  " << e.identity << "  " << e.params;
    if (!e.window.empty()) out << "  window=" << e.window;
    out << "  checked=" << e.checked << "\n";
    if (!e.failure.empty()) out << "      failure: " << e.failure << "\n";
    for (auto& [k, v] : e.details) out << "      " << k << ": " << v << "\n";
  }
  auto s = summarize(es);
  out << "summary: " << es.size() << " entries, " << s.pass << " pass, " << s.fail << " fail, " << s.skipped
      << " skipped\n";
  out << (s.fail ? "FAIL" : "PASS") << "\n";
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact verification of the twisted regular representation of the rank-1 free boson"};
  app.set_version_flag("--version", "twreg 1.0");
  auto* run = app.add_subcommand("run", "Run verification suites (the default)");
  run->fallthrough();
  std::map<std::string, std::string> flags;
  for (auto& k : kKeys) {
    static const std::map<std::string, std::string> help{
        {"example", "free-boson | free-boson-twisted | path to a module description"},
        {"z", "nonzero rational z"},
        {"weight-bound", "weight bound for basis vectors"},
        {"window", "exponent window: N for [-N,N], or lo,hi"},
        {"k-max", "largest pole order searched for membership witnesses"},
        {"q-depth", "trace depth above the lowest weight"},
        {"suites", "comma-separated suites, or all"},
        {"jobs", "worker threads"},
        {"format", "text | json"},
        {"output", "write the report to this file"},
    };
    app.add_option_function<std::string>(
        "--" + k, [&flags, k](const std::string& v) { flags[k] = v; }, help.at(k));
  }
  std::string config_path;
  app.add_option("--config", config_path, "key=value config file; flags override it");
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Options opt;
  try {
    std::map<std::string, std::pair<std::string, std::string>> values;
    if (!config_path.empty()) values = read_config(config_path);
    for (auto& [k, v] : flags) values[k] = {v, "--" + k};
    opt = build(values);
  } catch (const ZError& e) {
    std::cerr << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  std::vector<Entry> entries;
  try {
    entries = run_suites(opt.run);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::string text = opt.format == "json" ? render_json(opt, entries) : render_text(opt, entries);
  if (opt.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opt.output, std::ios::binary);
    if (!out) {
      std::cerr << "cannot write " << opt.output << "\n";
      return 1;
    }
    out << text;
  }
  return summarize(entries).fail ? 1 : 0;
}
