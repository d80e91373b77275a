#include "cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "api_service.hpp"
#include "gradlens/chart.hpp"
#include "gradlens/ingest.hpp"
#include "gradlens/report_io.hpp"
#include "requests.hpp"
#include "text_table.hpp"

namespace gradlens::app {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed(double value, int decimals) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

// Flags shared by the analysis subcommands; each becomes a named parameter.
struct QueryFlags {
  std::string dataset;
  std::string format = "table";
  std::string output;
  std::string title;
  std::vector<std::string> institutions;
  std::vector<std::string> metrics;
  std::string year, years, group, scope, reference_scope, award_level, axis, kind;
  bool per_institution = false;

  Params params() const {
    Params p;
    auto put = [&](const char* name, const std::string& value) {
      if (!value.empty()) p[name] = value;
    };
    std::string joined;
    for (const auto& id : institutions) joined += (joined.empty() ? "" : ",") + id;
    put("institution", joined);
    joined.clear();
    for (const auto& m : metrics) joined += (joined.empty() ? "" : ";") + m;
    put("metric", joined);
    put("year", year);
    put("years", years);
    put("group", group);
    put("scope", scope);
    put("reference-scope", reference_scope);
    put("award-level", award_level);
    put("axis", axis);
    if (per_institution) p["per-institution"] = "true";
    return p;
  }
};

void add_option(CLI::App* sub, QueryFlags& f, std::string_view name) {
  if (name == "institution")
    sub->add_option("--institution,-i", f.institutions,
                    "Institution id(s); repeat or comma-separate. Omit for all institutions")
        ->delimiter(',');
  else if (name == "year")
    sub->add_option("--year,-y", f.year, "Completion year");
  else if (name == "years")
    sub->add_option("--years", f.years, "Year range, e.g. 2010-2019");
  else if (name == "group")
    sub->add_option("--group,-g", f.group,
                    "Group: \"Race,Gender\" cell, or a single gender or race label");
  else if (name == "scope")
    sub->add_option("--scope", f.scope, "Program field: cip11 (default), all, cip:<prefix>[,...]");
  else if (name == "reference-scope")
    sub->add_option("--reference-scope", f.reference_scope,
                    "Reference field for cohorts and comparisons (default: all)");
  else if (name == "award-level")
    sub->add_option("--award-level", f.award_level,
                    "bachelors (default), associates, masters, doctoral, certificate, other, any");
  else if (name == "axis")
    sub->add_option("--axis", f.axis, "gender, race or intersectional");
  else if (name == "metric")
    sub->add_option("--metric,-m", f.metrics,
                    "series: standard|cohort|jsdistance; compare: standard:<group> or "
                    "cohort:<group> (repeatable)");
  else if (name == "per-institution")
    sub->add_flag("--per-institution", f.per_institution, "One series per institution");
}

CLI::App* analysis_command(CLI::App& app, const char* name, const char* help, QueryFlags& f,
                           std::initializer_list<std::string_view> options, bool svg) {
  auto* sub = app.add_subcommand(name, help);
  sub->add_option("--dataset,-d", f.dataset, "Dataset directory")->required();
  sub->add_option("--format,-f", f.format,
                  svg ? "table (default), csv, json or svg" : "table (default), csv or json");
  sub->add_option("--output,-o", f.output, "Write to this file instead of stdout");
  sub->add_option("--title", f.title, "Chart title (svg)");
  for (auto o : options) add_option(sub, f, o);
  return sub;
}

void emit(const QueryFlags& f, const std::string& text, std::ostream& out) {
  if (f.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(f.output, std::ios::binary | std::ios::trunc);
  file << text;
  if (!file) throw Error(ErrorKind::Io, "cannot write output file", f.output);
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

std::string table_text(const TextTable& table, bool color) {
  std::ostringstream s;
  table.print(s, color);
  return s.str();
}

void require_format(const QueryFlags& f, std::initializer_list<std::string_view> allowed) {
  for (auto a : allowed)
    if (f.format == a) return;
  std::string list;
  for (auto a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
  throw UsageError("--format must be one of: " + list);
}

std::string default_title(const QueryFlags& f, std::string_view what) {
  if (!f.title.empty()) return f.title;
  std::string out(what);
  if (!f.institutions.empty()) {
    out += " - ";
    for (std::size_t i = 0; i < f.institutions.size(); ++i) out += (i ? ", " : "") + f.institutions[i];
  }
  if (!f.years.empty()) out += " " + f.years;
  if (!f.year.empty()) out += " " + f.year;
  return out;
}

std::string series_text(const SeriesReport& report, bool color) {
  TextTable table({"year", "institution", "group", "metric", "value"});
  for (const auto& p : report.points)
    table.add({std::to_string(p.year), p.institution.empty() ? "(all)" : p.institution, p.group,
               std::string(to_string(p.metric)),
               p.metric == Metric::JSDistance ? fixed(p.value, 4) : fixed(p.value, 1)});
  return table_text(table, color);
}

std::string evenness_text(const EvennessComparison& report, bool color) {
  TextTable table({"institution", "gender", "race", "intersectional"});
  for (const auto& r : report.rows)
    table.add({r.institution, fixed(r.gender, 1), fixed(r.race, 1), fixed(r.intersectional, 1)});
  return table_text(table, color);
}

std::string gap_text(const GapReport& report, bool color) {
  TextTable table({"race", "gender", "program %", "university %", "gap"});
  for (const auto& r : report.rows)
    table.add({r.cell.race, r.cell.gender, fixed(r.program_share, 1), fixed(r.university_share, 1),
               fixed(r.gap, 1)});
  return table_text(table, color);
}

std::string compare_text(const ComparisonReport& report, bool color) {
  std::vector<std::string> header{"metric"};
  header.insert(header.end(), report.institutions.begin(), report.institutions.end());
  TextTable table(header);
  const std::size_t n = report.institutions.size();
  for (std::size_t i = 0; i < report.rows.size(); i += n) {
    std::vector<std::string> row{report.rows[i].metric};
    for (std::size_t j = 0; j < n; ++j) {
      const auto& cell = report.rows[i + j];
      row.push_back(cell.value ? fixed(*cell.value, 1) : cell.error.value_or("-"));
    }
    table.add(row);
  }
  return table_text(table, color);
}

std::string jsdistance_text(const JsDistanceReport& report, bool color) {
  TextTable table({"rank", "institution", "js distance"});
  for (std::size_t i = 0; i < report.rows.size(); ++i)
    table.add({std::to_string(i + 1), report.rows[i].institution, fixed(report.rows[i].distance, 4)});
  return table_text(table, color);
}

int run_ingest(const QueryFlags& f, const std::string& raw, const std::string& canonical,
               const std::string& column_map, const std::string& names, int year,
               const std::string& name, IngestPolicy policy, std::ostream& out, std::ostream& err) {
  if (raw.empty() == canonical.empty() && names.empty())
    throw UsageError("give exactly one of --raw or --canonical");
  IngestOptions options;
  options.policy = policy;
  if (year != 0) options.year = year;
  if (!name.empty()) options.name = name;
  if (!raw.empty() || !canonical.empty()) {
    auto report = !raw.empty()
                      ? ingest_raw(f.dataset, raw,
                                   column_map.empty() ? ColumnMap::ipeds_completions()
                                                      : ColumnMap::load(column_map),
                                   options)
                      : ingest_canonical(f.dataset, canonical, options);
    print_warnings(report.warnings, err);
    if (report.already_ingested) {
      out << "already ingested (same digest); dataset unchanged\n";
    } else {
      out << "rows read:       " << report.rows_read << '\n'
          << "rows skipped:    " << report.rows_skipped << '\n'
          << "records added:   " << report.records_added << '\n'
          << "graduates added: " << report.total_added << '\n';
      if (!report.excluded_columns.empty()) {
        out << "excluded columns:";
        for (const auto& c : report.excluded_columns) out << ' ' << c;
        out << '\n';
      }
      if (!report.unmapped_columns.empty()) {
        out << "unmapped columns:";
        for (const auto& c : report.unmapped_columns) out << ' ' << c;
        out << '\n';
      }
    }
    const auto& m = report.manifest;
    out << "dataset:         " << m.name << " (" << m.records << " records, " << m.institutions
        << " institutions";
    if (m.years) out << ", " << m.years->first << '-' << m.years->last;
    out << ")\n";
  }
  if (!names.empty()) {
    import_institution_names(f.dataset, names);
    out << "institution names imported\n";
  }
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            bool color) {
  CLI::App app{"gradlens: standard, cohort, intersectional and entropy-based views of degree "
               "completions"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Expand all help");
  QueryFlags f;

  // ingest
  std::string raw, canonical, column_map, names, name, write_template;
  int year = 0;
  IngestPolicy policy;
  auto* ingest = app.add_subcommand("ingest", "Ingest a raw IPEDS completions file or a canonical CSV");
  ingest->add_option("--dataset,-d", f.dataset, "Dataset directory (created if missing)")->required();
  ingest->add_option("--raw", raw, "Raw completions file (delimited text with header)");
  ingest->add_option("--canonical", canonical,
                     "Canonical CSV: institution_id,year,cip_family,award_level,gender,race,count");
  ingest->add_option("--column-map", column_map,
                     "Column map for --raw (default: recent IPEDS C<year>_A layout)");
  ingest->add_option("--year", year, "Completion year for raw files without a year column");
  ingest->add_option("--name", name, "Dataset name (first ingest only)");
  ingest->add_option("--names", names, "institution_id,name lookup file to attach");
  ingest->add_flag("--include-second-majors", policy.include_second_majors,
                   "Count second-major rows too");
  ingest->add_flag("--include-nonresident", policy.extras.nonresident,
                   "Keep the U.S. Nonresident category in the scheme");
  ingest->add_flag("--include-unknown", policy.extras.unknown,
                   "Keep the race/ethnicity unknown category in the scheme");

  auto* standard = analysis_command(app, "standard", "Group's share of the field's degrees", f,
                                    {"institution", "year", "group", "scope", "award-level"}, false);
  auto* cohort = analysis_command(app, "cohort", "Group's field degrees as a share of the group's degrees", f,
                                  {"institution", "year", "group", "scope", "reference-scope", "award-level"},
                                  false);
  auto* series_cmd = analysis_command(
      app, "series", "Yearly standard/cohort share or JS distance", f,
      {"metric", "group", "institution", "years", "scope", "reference-scope", "award-level",
       "per-institution"},
      true);
  auto* gap = analysis_command(app, "gap", "Opportunity gap: program vs reference share per cell", f,
                               {"institution", "year", "scope", "reference-scope", "award-level"}, true);
  auto* evenness = analysis_command(
      app, "evenness", "Shannon equitability: a series with --years, a per-institution comparison with --year",
      f, {"institution", "axis", "years", "year", "scope", "award-level"}, true);
  auto* jsdistance = analysis_command(app, "jsdistance", "Rank institutions by JS distance", f,
                                      {"institution", "year", "scope", "reference-scope", "award-level"},
                                      false);
  auto* compare = analysis_command(app, "compare", "Side-by-side institution table", f,
                                   {"institution", "year", "metric", "award-level"}, false);
  auto* chart = analysis_command(
      app, "export-chart", "Write a line, dumbbell, bar or pair chart", f,
      {"institution", "year", "years", "group", "scope", "reference-scope", "award-level", "axis",
       "metric", "per-institution"},
      true);
  chart->add_option("--kind,-k", f.kind, "line, dumbbell, bar or pair")->required();

  std::string host = "127.0.0.1", cors;
  int port = 8080;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the read-only JSON API");
  serve_cmd->add_option("--dataset,-d", f.dataset, "Dataset directory")->required();
  serve_cmd->add_option("--host", host, "Bind address (default 127.0.0.1)");
  serve_cmd->add_option("--port,-p", port, "Port (default 8080)");
  serve_cmd->add_option("--cors-origin", cors, "Allowed CORS origin for the explorer");

  std::vector<std::string> argv_storage{"gradlens"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  CLI::App* active = &app;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    for (auto* sub : app.get_subcommands()) active = sub;
  } catch (const CLI::CallForHelp&) {
    for (auto* sub : app.get_subcommands()) active = sub;
    out << active->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    for (auto* sub : app.get_subcommands()) active = sub;
    err << "error: " << e.what() << "\n\n" << active->help();
    return 1;
  }

  auto params = f.params();
  try {
    if (active == ingest)
      return run_ingest(f, raw, canonical, column_map, names, year, name, policy, out, err);
    if (active == serve_cmd)
      return serve(f.dataset, host, port, cors.empty() ? std::nullopt : std::optional(cors), err);

    auto dataset = Dataset::open(f.dataset);
    if (active == standard || active == cohort) {
      require_format(f, {"table", "csv", "json"});
      auto endpoint = active == standard ? Endpoint::Standard : Endpoint::Cohort;
      check_params(endpoint, params);
      if (f.format == "json") {
        emit(f, dump_body(run_endpoint(dataset, endpoint, params)), out);
        return 0;
      }
      auto r = run_share(dataset, active == standard ? Metric::StandardShare : Metric::CohortShare,
                         params);
      if (f.format == "csv") {
        std::string inst;
        for (const auto& id : r.institutions) inst += (inst.empty() ? "" : "+") + id;
        emit(f, "metric,group,institution,year,value\n" + std::string(to_string(r.metric)) + ",\"" +
                    r.group.label() + "\"," + inst + "," + std::to_string(r.year) + "," +
                    [&] { std::ostringstream s; s.precision(17); s << r.value; return s.str(); }() +
                    "\n",
             out);
      } else {
        emit(f, fixed(r.value, 1) + "\n", out);
      }
      return 0;
    }
    if (active == series_cmd) {
      require_format(f, {"table", "csv", "json", "svg"});
      if (f.format == "json") {
        emit(f, dump_body(run_endpoint(dataset, Endpoint::Series, params)), out);
        return 0;
      }
      check_params(Endpoint::Series, params);
      auto report = run_series(dataset, params);
      print_warnings(report.warnings, err);
      if (f.format == "csv") emit(f, series_csv(report.points), out);
      else if (f.format == "svg")
        emit(f, emit_chart({ChartKind::Line, default_title(f, "Series"), report.points, ChartFormat::Svg}), out);
      else emit(f, series_text(report, color), out);
      return 0;
    }
    if (active == gap) {
      require_format(f, {"table", "csv", "json", "svg"});
      if (f.format == "json") {
        emit(f, dump_body(run_endpoint(dataset, Endpoint::Gap, params)), out);
        return 0;
      }
      auto report = run_gap(dataset, params);
      if (f.format == "csv") emit(f, gap_csv(report.rows), out);
      else if (f.format == "svg")
        emit(f, emit_chart({ChartKind::GroupedBar, default_title(f, "Opportunity gap"), report.rows, ChartFormat::Svg}), out);
      else emit(f, gap_text(report, color), out);
      return 0;
    }
    if (active == evenness) {
      require_format(f, {"table", "csv", "json", "svg"});
      if (f.format == "json") {
        emit(f, dump_body(run_endpoint(dataset, Endpoint::Evenness, params)), out);
        return 0;
      }
      auto result = run_evenness(dataset, params);
      if (auto* s = std::get_if<SeriesReport>(&result)) {
        print_warnings(s->warnings, err);
        if (f.format == "csv") emit(f, series_csv(s->points), out);
        else if (f.format == "svg")
          emit(f, emit_chart({ChartKind::Line, default_title(f, "Shannon equitability"), s->points, ChartFormat::Svg}), out);
        else emit(f, series_text(*s, color), out);
      } else {
        auto& c = std::get<EvennessComparison>(result);
        for (const auto& s : c.skipped) err << "warning: " << s.institution << ": " << s.reason << '\n';
        if (f.format == "csv") emit(f, evenness_csv(c.rows), out);
        else if (f.format == "svg")
          emit(f, emit_chart({ChartKind::Dumbbell, default_title(f, "Shannon equitability"), c.rows, ChartFormat::Svg}), out);
        else emit(f, evenness_text(c, color), out);
      }
      return 0;
    }
    if (active == jsdistance) {
      require_format(f, {"table", "csv", "json"});
      if (f.format == "json") {
        emit(f, dump_body(run_endpoint(dataset, Endpoint::JsDistance, params)), out);
        return 0;
      }
      auto report = run_jsdistance(dataset, params);
      for (const auto& s : report.skipped) err << "warning: skipped " << s.institution << ": " << s.reason << '\n';
      emit(f, f.format == "csv" ? js_distance_csv(report) : jsdistance_text(report, color), out);
      return 0;
    }
    if (active == compare) {
      require_format(f, {"table", "csv", "json"});
      if (f.format == "json") {
        emit(f, dump_body(run_endpoint(dataset, Endpoint::Compare, params)), out);
        return 0;
      }
      auto report = run_compare(dataset, params);
      emit(f, f.format == "csv" ? comparison_csv(report) : compare_text(report, color), out);
      return 0;
    }
    if (active == chart) {
      if (f.format == "table") f.format = "svg";
      require_format(f, {"svg", "csv", "json"});
      auto kind = parse_chart_kind(f.kind);
      if (!kind) throw UsageError("--kind must be line, dumbbell, bar or pair");
      ChartSpec spec{*kind, {}, {}, *parse_chart_format(f.format)};
      switch (*kind) {
        case ChartKind::Line: {
          if (!f.metrics.empty() && f.metrics.front() == "evenness") {
            params.erase("metric");
            auto report = evenness_series(
                dataset, EvennessRequest{Selection{param_institutions(params), param_award_level(params)},
                                         param_axis(params, Axis::Intersectional),
                                         param_scope(params, "scope", FieldScope::computing()),
                                         param_years(params)});
            print_warnings(report.warnings, err);
            spec.title = default_title(f, "Shannon equitability");
            spec.payload = report.points;
          } else {
            auto report = run_series(dataset, params);
            print_warnings(report.warnings, err);
            spec.title = default_title(f, "Series");
            spec.payload = report.points;
          }
          break;
        }
        case ChartKind::Dumbbell: {
          auto c = compare_evenness(dataset, param_institutions(params), param_year(params),
                                    param_scope(params, "scope", FieldScope::all_degrees()),
                                    param_award_level(params));
          for (const auto& s : c.skipped) err << "warning: " << s.institution << ": " << s.reason << '\n';
          spec.title = default_title(f, "Shannon equitability by institution");
          spec.payload = c.rows;
          break;
        }
        case ChartKind::GroupedBar:
          spec.title = default_title(f, "Program vs all degrees");
          spec.payload = run_gap(dataset, params).rows;
          break;
        case ChartKind::DistributionPair:
          spec.title = default_title(f, "Intersectional distributions");
          spec.payload = run_pair(dataset, params);
          break;
      }
      emit(f, emit_chart(spec), out);
      if (!f.output.empty()) out << "wrote " << f.output << '\n';
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active->help();
    return 1;
  } catch (const ParamError& e) {
    err << "error: " << e.name() << ": " << e.what() << "\n\n" << active->help();
    return 1;
  } catch (const ParamDataError& e) {
    err << "error: " << e.name() << ": " << e.what() << " [--" << e.parameter();
    if (!e.context().empty()) err << " " << e.context();
    err << "]\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.name() << ": " << e.what();
    if (!e.context().empty()) err << " [" << e.context() << "]";
    err << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  err << app.help();
  return 1;
}

}  // namespace gradlens::app
