#include <filesystem>
#include <iostream>
#include <set>
#include <string>

#include "CLI11.hpp"

#include "medfg/builder.hpp"
#include "medfg/config.hpp"
#include "medfg/dfg.hpp"
#include "medfg/errors.hpp"
#include "medfg/log.hpp"
#include "medfg/mimic.hpp"
#include "medfg/serialize.hpp"
#include "medfg/synth.hpp"
#include "medfg/tabular.hpp"

namespace {

using medfg::Error;
using medfg::ErrorCode;

void require_exists(const std::string& path) {
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::FileNotFound, "no such file or directory: " + path);
  }
}

medfg::EntityRef parse_case(const std::string& text) {
  const std::size_t colon = text.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == text.size()) {
    throw Error(ErrorCode::BadFlag,
                "--case expects TYPE:ID, got '" + text + "'");
  }
  return medfg::EntityRef{text.substr(0, colon), text.substr(colon + 1)};
}

struct ExtractArgs {
  std::string bundle_dir;
  std::string out;
  std::string code_labels;
};

int run_extract(const ExtractArgs& args) {
  require_exists(args.bundle_dir);
  medfg::MimicConfig config;
  if (!args.code_labels.empty()) {
    config = medfg::MimicConfig::from_key_values(
        medfg::KeyValueFile::load(args.code_labels));
  }
  const auto bundle = medfg::RelationalBundle::load(args.bundle_dir);
  const auto extraction = medfg::extract_all(bundle, config);
  for (const auto& issue : extraction.issues) {
    std::cerr << "warning: " << medfg::error_code_name(issue.code) << ": "
              << issue.detail << "\n";
  }
  medfg::write_file(args.out, medfg::log_to_tabular(extraction.records,
                                                    medfg::mimic_log_schema()));
  std::cout << medfg::validate_log(extraction.records).to_string();
  return 0;
}

struct BuildArgs {
  std::string log_file;
  std::string schema_file;
  std::string config_file;
  std::string out;
  // schema overrides; take precedence over --schema / the default layout
  std::string activity_column;
  std::string timestamp_column;
  std::string entity_columns;
  std::string property_columns;
  std::string delimiter;
};

int run_build(const BuildArgs& args) {
  require_exists(args.log_file);
  medfg::LogSchema schema = args.schema_file.empty()
                                ? medfg::mimic_log_schema()
                                : medfg::LogSchema::load(args.schema_file);
  if (!args.activity_column.empty()) {
    schema.activity_column = args.activity_column;
  }
  if (!args.timestamp_column.empty()) {
    schema.timestamp_column = args.timestamp_column;
  }
  if (!args.entity_columns.empty()) {
    schema.entity_columns = medfg::split_list(args.entity_columns, ',');
  }
  if (!args.property_columns.empty()) {
    schema.property_columns = medfg::split_list(args.property_columns, ',');
  }
  if (!args.delimiter.empty()) {
    if (args.delimiter == "tab") {
      schema.delimiter = '\t';
    } else if (args.delimiter.size() == 1) {
      schema.delimiter = args.delimiter[0];
    } else {
      throw Error(ErrorCode::BadFlag,
                  "--delimiter must be a single character or 'tab'");
    }
  }
  schema.validate();
  const medfg::BuildConfig config =
      args.config_file.empty() ? medfg::BuildConfig{}
                               : medfg::BuildConfig::load(args.config_file);
  const auto records = medfg::parse_log(medfg::read_file(args.log_file), schema);
  const auto graph = medfg::build_all(records, config);
  medfg::write_file(args.out, medfg::graph_to_json(graph));
  return 0;
}

struct DiscoverArgs {
  std::string graph_file;
  std::string level = "class";
  std::string case_ref;
  std::string entity_types;
  std::uint64_t min_count = 1;
  std::vector<std::string> colors;
  std::string out;
};

int run_discover(const DiscoverArgs& args) {
  require_exists(args.graph_file);
  if (args.min_count < 1) {
    throw Error(ErrorCode::BadFlag, "--min-count must be at least 1");
  }
  const auto graph = medfg::graph_from_json(medfg::read_file(args.graph_file));

  std::set<std::string> types;
  if (args.entity_types.empty()) {
    types = medfg::all_entity_types(graph);
  } else {
    for (const auto& type : medfg::split_list(args.entity_types, ',')) {
      types.insert(type);
    }
  }

  medfg::DfgView view;
  if (args.level == "class") {
    view = medfg::project_class_dfg(graph, types);
    if (args.min_count > 1) view = medfg::filter_dfg(view, args.min_count);
  } else if (args.level == "instance") {
    if (args.case_ref.empty()) {
      throw Error(ErrorCode::BadFlag,
                  "--case TYPE:ID is required at instance level");
    }
    view = medfg::project_instance_dfg(graph, parse_case(args.case_ref), types);
    if (args.min_count > 1) view = medfg::filter_dfg(view, args.min_count);
  } else {
    throw Error(ErrorCode::BadFlag,
                "--level must be 'class' or 'instance', got '" + args.level +
                    "'");
  }

  medfg::Palette palette = medfg::Palette::defaults();
  for (const std::string& assignment : args.colors) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == assignment.size()) {
      throw Error(ErrorCode::BadFlag,
                  "--color expects TYPE=COLOR, got '" + assignment + "'");
    }
    palette.set(assignment.substr(0, eq), assignment.substr(eq + 1));
  }
  medfg::write_file(args.out, medfg::to_dot(view, palette));
  return 0;
}

struct CohortArgs {
  std::string bundle_dir;
  std::string out;
};

int run_cohort(const CohortArgs& args) {
  require_exists(args.bundle_dir);
  const auto bundle = medfg::RelationalBundle::load(args.bundle_dir);
  const auto groups = medfg::diagnosis_groups(bundle);
  const auto rows = medfg::cohort_table(groups);

  auto join = [](const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i > 0) out += " - ";
      out += items[i];
    }
    return out;
  };
  std::string text = medfg::format_row(
      std::vector<std::string>{"icd_codes", "frequency", "admission_ids"},
      ',');
  for (const auto& row : rows) {
    text += medfg::format_row(
        std::vector<std::string>{join(row.code_set),
                                 std::to_string(row.frequency),
                                 join(row.admission_ids)},
        ',');
  }
  medfg::write_file(args.out, text);
  return 0;
}

struct SynthArgs {
  std::uint64_t seed = 42;
  std::size_t patients = 20;
  std::string out;
  medfg::SynthParams params;
};

int run_synth(const SynthArgs& args) {
  const auto bundle = medfg::generate_bundle(args.seed, args.patients,
                                             args.params);
  bundle.save(args.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-entity event graph construction and DFG discovery"};
  app.require_subcommand(1);

  ExtractArgs extract_args;
  auto* extract = app.add_subcommand(
      "extract", "convert a relational bundle into a multi-entity event log");
  extract->add_option("bundle", extract_args.bundle_dir,
                      "directory with <TABLE>.csv files")->required();
  extract->add_option("--out", extract_args.out, "output event log file")
      ->required();
  extract->add_option("--code-labels", extract_args.code_labels,
                      "key-value file mapping ICD codes to short labels");

  BuildArgs build_args;
  auto* build = app.add_subcommand(
      "build", "ingest an event log and build the event graph");
  build->add_option("log", build_args.log_file, "event log file")->required();
  build->add_option("--schema", build_args.schema_file,
                    "log schema file (defaults to the extract layout)");
  build->add_option("--config", build_args.config_file, "build config file");
  build->add_option("--out", build_args.out, "output graph JSON file")
      ->required();
  build->add_option("--activity-column", build_args.activity_column,
                    "override the schema's activity column");
  build->add_option("--timestamp-column", build_args.timestamp_column,
                    "override the schema's timestamp column");
  build->add_option("--entity-columns", build_args.entity_columns,
                    "override the schema's entity columns (comma list)");
  build->add_option("--property-columns", build_args.property_columns,
                    "override the schema's property columns (comma list)");
  build->add_option("--delimiter", build_args.delimiter,
                    "override the schema's delimiter (char or 'tab')");

  DiscoverArgs discover_args;
  auto* discover = app.add_subcommand(
      "discover", "project a directly-follows view and render it as DOT");
  discover->add_option("graph", discover_args.graph_file, "graph JSON file")
      ->required();
  discover->add_option("--level", discover_args.level,
                       "'class' (default) or 'instance'");
  discover->add_option("--case", discover_args.case_ref,
                       "case entity as TYPE:ID (instance level)");
  discover->add_option("--entity-types", discover_args.entity_types,
                       "comma list of entity types (default: all)");
  discover->add_option("--min-count", discover_args.min_count,
                       "drop class-level edges below this count");
  discover->add_option("--color", discover_args.colors,
                       "extra palette entries as TYPE=COLOR");
  discover->add_option("--out", discover_args.out, "output DOT file")
      ->required();

  CohortArgs cohort_args;
  auto* cohort = app.add_subcommand(
      "cohort", "group admissions by diagnosis code set");
  cohort->add_option("bundle", cohort_args.bundle_dir,
                     "directory with <TABLE>.csv files")->required();
  cohort->add_option("--out", cohort_args.out, "output table file")
      ->required();

  SynthArgs synth_args;
  auto* synth = app.add_subcommand(
      "synth", "generate a deterministic synthetic relational bundle");
  synth->add_option("--seed", synth_args.seed, "generator seed");
  synth->add_option("--patients", synth_args.patients, "number of patients");
  synth->add_option("--out", synth_args.out, "output directory")->required();
  synth->add_option("--multimorbid-rate", synth_args.params.multimorbid_rate);
  synth->add_option("--readmission-rate", synth_args.params.readmission_rate);
  synth->add_option("--transfer-rate", synth_args.params.transfer_rate);
  synth->add_option("--lab-rate", synth_args.params.lab_rate);
  synth->add_option("--abnormal-rate", synth_args.params.abnormal_rate);
  synth->add_option("--prescription-rate",
                    synth_args.params.prescription_rate);
  synth->add_option("--outpatient-lab-rate",
                    synth_args.params.outpatient_lab_rate);
  synth->add_option("--ed-rate", synth_args.params.ed_rate);
  synth->add_option("--callout-rate", synth_args.params.callout_rate);
  synth->add_option("--death-rate", synth_args.params.death_rate);

  CLI11_PARSE(app, argc, argv);

  try {
    if (extract->parsed()) return run_extract(extract_args);
    if (build->parsed()) return run_build(build_args);
    if (discover->parsed()) return run_discover(discover_args);
    if (cohort->parsed()) return run_cohort(cohort_args);
    if (synth->parsed()) return run_synth(synth_args);
  } catch (const Error& e) {
    std::cerr << "error: " << medfg::error_code_name(e.code()) << ": "
              << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
