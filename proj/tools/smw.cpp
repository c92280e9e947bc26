#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>

#include "smw/constructors.hpp"
#include "smw/error.hpp"
#include "smw/harness.hpp"
#include "smw/machine_io.hpp"
#include "smw/presentation.hpp"
#include "smw/trapezia.hpp"

using namespace smw;

namespace {

constexpr int kOk = 0, kUsage = 1, kFailed = 2, kIo = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(ErrorCode::io_error, "cannot write " + path);
}

std::vector<std::string> split_letters(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Where a machine comes from: a file, or a constructor and its parameters.
struct MachineSpec {
  std::string file;
  std::string machine = "main";
  std::string toy = "toy-even";
  int m = 2;
  int L = 12;
  std::string letters = "a,b";
  std::string manifest;

  void add_options(CLI::App* app, bool with_file = true) {
    if (with_file) app->add_option("--file", file, "machine file to load instead of a constructor");
    app->add_option("--machine", machine, "toy-even|toy-all|lr|rl|lr-m|m2|m2bar|m3|m4|m5|main|trimmed")
        ->capture_default_str();
    app->add_option("--toy", toy, "toy recognizer standing in for M1")->capture_default_str();
    app->add_option("--m", m, "LR_m repetitions")->capture_default_str();
    app->add_option("--L", L, "superscript range and hub power")->capture_default_str();
    app->add_option("--letters", letters, "tape letters of lr, rl and lr-m")->capture_default_str();
    app->add_option("--manifest", manifest, "replay the parameters recorded in a manifest");
  }

  void apply_manifest() {
    if (manifest.empty()) return;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_file(manifest));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse_error, manifest + ": " + e.what());
    }
    if (j.contains("machine")) machine = j.at("machine").get<std::string>();
    if (j.contains("toy")) toy = j.at("toy").get<std::string>();
    if (j.contains("m")) m = j.at("m").get<int>();
    if (j.contains("L")) L = j.at("L").get<int>();
    if (j.contains("letters")) letters = j.at("letters").get<std::string>();
  }

  bool needs_bundle() const { return machine == "main" || machine == "trimmed" || machine == "m4" || machine == "m5"; }

  MainMachineBundle bundle() const { return build_main_machine(toy_by_name(toy), m, L); }

  SMachine build(std::optional<MainMachineBundle>* keep = nullptr) const {
    if (!file.empty()) return parse_machine(read_file(file));
    if (machine == "toy-even") return toy_even().machine;
    if (machine == "toy-all") return toy_all().machine;
    if (machine == "lr") return build_lr(split_letters(letters));
    if (machine == "rl") return build_rl(split_letters(letters));
    if (machine == "lr-m") return build_lr_m(split_letters(letters), m);
    const ToyRecognizer t = toy_by_name(toy);
    if (machine == "m2") return add_history_sectors(t.machine);
    if (machine == "m2bar") return add_control_letters(add_history_sectors(t.machine));
    if (machine == "m3") return compose_m3(add_control_letters(add_history_sectors(t.machine)), m);
    if (!needs_bundle()) throw Error(ErrorCode::bad_parameters, "unknown machine '" + machine + "'");
    MainMachineBundle b = bundle();
    SMachine out = machine == "main"      ? b.machine
                   : machine == "trimmed" ? build_trimmed_machine(b)
                   : machine == "m4"      ? mirror_m4(b.m3)
                                          : circularize_m5(mirror_m4(b.m3));
    if (keep) *keep = std::move(b);
    return out;
  }

  void check_hash(const SMachine& built) const {
    if (manifest.empty()) return;
    auto j = nlohmann::json::parse(read_file(manifest));
    if (j.contains("hash") && j.at("hash").get<std::string>() != machine_hash(built))
      throw Error(ErrorCode::witness_invalid, "machine hash differs from " + manifest);
  }
};

// W_st, W_ac and W(k,k') name words of the main machine; anything else is parsed.
AdmissibleWord resolve_word(const SMachine& m, const std::optional<MainMachineBundle>& b, const std::string& text) {
  static const std::regex junction(R"(W\((-?\d+),(-?\d+)\))");
  std::smatch mt;
  if (b && text == "W_st") return b->w_st;
  if (b && text == "W_ac") return b->w_ac;
  if (b && std::regex_match(text, mt, junction)) return b->junction_word(std::stol(mt[1]), std::stol(mt[2]));
  return parse_admissible(m, text);
}

nlohmann::json manifest_for(const MachineSpec& spec, const SMachine& m, int N) {
  return nlohmann::json{{"machine", spec.file.empty() ? spec.machine : m.name()},
                        {"toy", spec.toy},
                        {"m", spec.m},
                        {"L", spec.L},
                        {"N", N},
                        {"letters", spec.letters},
                        {"hash", machine_hash(m)}};
}

ExportFormat parse_format(const std::string& f) {
  if (f == "plain") return ExportFormat::plain;
  if (f == "gap" || f == "gap-style") return ExportFormat::gap;
  throw Error(ErrorCode::bad_parameters, "unknown format '" + f + "'");
}

HistoryFilter parse_filter(const std::string& f) {
  if (f == "reduced") return HistoryFilter::reduced;
  if (f == "eligible") return HistoryFilter::eligible;
  if (f == "all") return HistoryFilter::all;
  throw Error(ErrorCode::bad_parameters, "unknown filter '" + f + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"S-machine constructions, group presentations and verification suites"};
  app.require_subcommand(1);
  int status = kOk;

  // build
  MachineSpec build_spec;
  std::string build_out = "-", build_manifest;
  bool flag_main = false, flag_even = false, flag_all = false;
  auto* build = app.add_subcommand("build", "construct a machine and write its canonical serialization");
  build_spec.add_options(build);
  build->add_flag("--main", flag_main, "the main machine (same as --machine main)");
  build->add_flag("--toy-even", flag_even, "use the toy accepting alpha^k for even k");
  build->add_flag("--toy-all", flag_all, "use the toy accepting every alpha^k");
  build->add_option("-o,--out", build_out, "machine file (- for stdout)");
  build->add_option("--manifest-out", build_manifest, "manifest path (default <out>.manifest.json)");
  build->callback([&] {
    if (flag_main) build_spec.machine = "main";
    if (flag_even && flag_all) throw CLI::ValidationError("--toy-even and --toy-all exclude each other");
    if (flag_even) build_spec.toy = "toy-even";
    if (flag_all) build_spec.toy = "toy-all";
    build_spec.apply_manifest();
    std::optional<MainMachineBundle> b;
    SMachine m = build_spec.build(&b);
    build_spec.check_hash(m);
    write_out(build_out, print_machine(m));
    std::string mpath = build_manifest;
    if (mpath.empty() && build_out != "-") mpath = build_out + ".manifest.json";
    if (!mpath.empty()) write_out(mpath, manifest_for(build_spec, m, m.hardware().part_count()).dump(2) + "\n");
  });

  // simulate
  MachineSpec sim_spec;
  std::string sim_word, sim_history;
  auto* simulate = app.add_subcommand("simulate", "run a history on a word and print the trace");
  sim_spec.add_options(simulate);
  simulate->add_option("--word", sim_word, "start word, or W_st, W_ac, W(k,k')")->required();
  simulate->add_option("--history", sim_history, "space-separated rule labels, inverses as label^-1")->required();
  simulate->callback([&] {
    sim_spec.apply_manifest();
    std::optional<MainMachineBundle> b;
    SMachine m = sim_spec.build(&b);
    Computation c = run_history(m, resolve_word(m, b, sim_word), parse_history(m, sim_history));
    std::cout << "0\t-\t" << to_string(m, c.trace[0]) << "\n";
    for (std::size_t i = 0; i < c.history.size(); ++i)
      std::cout << i + 1 << "\t" << m.rule(c.history[i]).signed_label() << "\t" << to_string(m, c.trace[i + 1]) << "\n";
  });

  // enumerate
  MachineSpec en_spec;
  std::string en_word, en_filter = "reduced";
  int en_depth = 3;
  std::size_t en_tape = static_cast<std::size_t>(-1), en_limit = 0;
  bool en_no12 = false;
  auto* enumerate = app.add_subcommand("enumerate", "stream computations from a word, depth first");
  en_spec.add_options(enumerate);
  enumerate->add_option("--word", en_word, "start word, or W_st, W_ac, W(k,k')")->required();
  enumerate->add_option("--depth", en_depth)->capture_default_str();
  enumerate->add_option("--filter", en_filter, "reduced|eligible|all")->capture_default_str();
  enumerate->add_option("--max-tape", en_tape, "skip words with more tape letters");
  enumerate->add_option("--limit", en_limit, "stop after this many computations (0: no limit)");
  enumerate->add_flag("--no-theta12", en_no12, "exclude the rules of Θ1 and Θ2");
  enumerate->callback([&] {
    en_spec.apply_manifest();
    std::optional<MainMachineBundle> b;
    SMachine m = en_spec.build(&b);
    EnumerationOptions opt;
    opt.depth = en_depth;
    opt.filter = parse_filter(en_filter);
    opt.max_tape = en_tape;
    if (en_no12) opt.allow = [](const Rule& r) { return !MainMachineBundle::in_theta12(r); };
    std::size_t n = 0;
    bool stop = false;
    for_each_computation(m, resolve_word(m, b, en_word), opt, [&](const ComputationView& c) {
      if (stop) return false;
      std::cout << (c.history.empty() ? "-" : history_to_string(m, History(c.history.begin(), c.history.end())))
                << "\t" << to_string(m, c.end()) << "\n";
      stop = en_limit != 0 && ++n >= en_limit;
      return !stop;
    });
  });

  // compile
  MachineSpec co_spec;
  std::string co_group = "G", co_format = "plain", co_out = "-";
  long co_k = 0;
  auto* compile = app.add_subcommand("compile", "emit a group presentation of the main machine");
  co_spec.add_options(compile, false);
  compile->add_option("--group", co_group, "G|M|Mbar|Gbar|Gk|Gbar-hnn")->capture_default_str();
  compile->add_option("--k", co_k, "k of G_k")->capture_default_str();
  compile->add_option("--format", co_format, "plain|gap|gap-style")->capture_default_str();
  compile->add_option("-o,--out", co_out);
  compile->callback([&] {
    co_spec.apply_manifest();
    MainMachineBundle b = co_spec.bundle();
    Presentation p;
    if (co_group == "G") {
      p = compile_group_G(b);
    } else if (co_group == "M") {
      p = compile_group_M(b);
    } else if (co_group == "Mbar") {
      p = compile_trimmed(b).first;
    } else if (co_group == "Gbar") {
      p = compile_trimmed(b).second;
    } else if (co_group == "Gk") {
      p = hnn_Gk(compile_group_G(b), b, co_k);
    } else if (co_group == "Gbar-hnn") {
      p = hnn_Gbar(compile_group_G(b), b);
    } else {
      throw Error(ErrorCode::bad_parameters, "unknown group '" + co_group + "'");
    }
    write_out(co_out, export_presentation(p, parse_format(co_format)));
  });

  // export
  std::string ex_in, ex_format = "gap", ex_out = "-";
  auto* exp = app.add_subcommand("export", "convert a plain presentation file to another format");
  exp->add_option("--in", ex_in, "presentation in the plain format")->required();
  exp->add_option("--format", ex_format, "plain|gap|gap-style")->capture_default_str();
  exp->add_option("-o,--out", ex_out);
  exp->callback([&] { write_out(ex_out, export_presentation(parse_presentation(read_file(ex_in)), parse_format(ex_format))); });

  // verify
  HarnessConfig cfg;
  std::vector<std::string> suites;
  std::string ve_out = "-", ve_manifest;
  auto* verify = app.add_subcommand("verify", "run verification suites and write a JSON report");
  verify->add_option("--suite", suites, "suite name, repeatable (default: all)");
  verify->add_option("--manifest", ve_manifest, "replay the configuration recorded in a report or manifest");
  verify->add_option("--toy", cfg.toy)->capture_default_str();
  verify->add_option("--m", cfg.m)->capture_default_str();
  verify->add_option("--L", cfg.L)->capture_default_str();
  verify->add_option("--seed", cfg.seed)->capture_default_str();
  verify->add_option("--words", cfg.roundtrip_words, "roundtrip words per machine")->capture_default_str();
  verify->add_option("--max-tape", cfg.lr_max_tape, "tape bound of the lr-bound sweep")->capture_default_str();
  verify->add_option("--wi-depth", cfg.wi_depth)->capture_default_str();
  verify->add_option("--chi-depth", cfg.chi_depth)->capture_default_str();
  verify->add_option("--norep-depth", cfg.norep_depth)->capture_default_str();
  verify->add_option("--k-min", cfg.k_min)->capture_default_str();
  verify->add_option("--k-max", cfg.k_max)->capture_default_str();
  verify->add_option("--trapezia", cfg.trapezia, "eligible computations to realize")->capture_default_str();
  verify->add_option("--jobs", cfg.jobs, "suites run in parallel; output order is fixed")->capture_default_str();
  verify->add_option("-o,--out", ve_out, "report path (- for stdout)");
  verify->callback([&] {
    if (!ve_manifest.empty()) {
      auto j = nlohmann::ordered_json::parse(read_file(ve_manifest));
      const int jobs = cfg.jobs;
      cfg = HarnessConfig::from_json(j.contains("config") ? j.at("config") : j);
      cfg.jobs = jobs;
    }
    for (const auto& s : suites) {
      if (std::find(suite_names().begin(), suite_names().end(), s) == suite_names().end())
        throw Error(ErrorCode::bad_parameters, "unknown suite '" + s + "'");
    }
    HarnessContext ctx(cfg);
    Report r = run_suites(suites.empty() ? suite_names() : suites, ctx);
    write_out(ve_out, r.dump(2) + "\n");
    std::cerr << render_report(r);
    if (!report_passed(r)) status = kFailed;
  });

  // disk
  MachineSpec di_spec;
  long di_k = 0;
  std::string di_word;
  std::vector<std::size_t> di_caps{4, 6, 8, 10, 12};
  auto* disk = app.add_subcommand("disk", "decide whether a word is a disk word and count the diagram");
  di_spec.add_options(disk, false);
  disk->add_option("--k", di_k, "use W(k,k)^L")->capture_default_str();
  disk->add_option("--word", di_word, "permissible word of the main machine instead of W(k,k)^L");
  disk->add_option("--tape-caps", di_caps, "tape caps tried in order")->capture_default_str();
  disk->callback([&] {
    di_spec.apply_manifest();
    MainMachineBundle b = di_spec.bundle();
    Word v;
    if (di_word.empty()) {
      const AdmissibleWord w = b.junction_word(di_k, di_k);
      for (int i = 0; i < b.L; ++i) v.insert(v.end(), w.letters().begin(), w.letters().end());
    } else {
      v = parse_word(b.machine.alphabet(), di_word);
    }
    DiskVerdict d;
    std::size_t cap = 0;
    for (std::size_t c : di_caps) {
      SearchOptions so;
      so.max_tape = c;
      d = is_disk_word(b, PermissibleWord{v}, so);
      cap = c;
      if (d.verdict != Verdict::unknown) break;
    }
    std::cout << "verdict " << to_string(d.verdict) << "\n";
    if (!d.reason.empty()) std::cout << "reason " << d.reason << "\n";
    std::cout << "tape_cap " << cap << "\n";
    if (d.root) std::cout << "root " << to_string(b.machine, *d.root) << "\n";
    if (d.verdict == Verdict::yes && d.root && d.witness) {
      const Presentation g = compile_group_G(b);
      const std::size_t len = d.witness->history.size();
      std::cout << "witness_length " << len << "\n";
      if (len) std::cout << "witness " << history_to_string(b.machine, d.witness->history) << "\n";
      std::cout << "cells " << disk_diagram_cells(b, g, *d.root, *d.witness) << "\n";
      std::cout << "NLd " << static_cast<std::size_t>(b.N) * static_cast<std::size_t>(b.L) * len << "\n";
    }
    if (d.verdict == Verdict::no) status = kFailed;
  });

  // report
  std::string re_in;
  auto* report = app.add_subcommand("report", "render a JSON report as text");
  report->add_option("--in", re_in, "report written by verify")->required();
  report->callback([&] {
    Report r;
    try {
      r = Report::parse(read_file(re_in));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse_error, re_in + ": " + e.what());
    }
    std::cout << render_report(r);
    if (!report_passed(r)) status = kFailed;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::io_error) return kIo;
    if (e.code() == ErrorCode::witness_invalid) return kFailed;
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return status;
}
