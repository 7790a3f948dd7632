#include "medfg/mimic.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "medfg/config.hpp"
#include "medfg/tabular.hpp"

namespace medfg {
namespace {

constexpr std::string_view kOutpatient = "Outpatient";

std::string patient_entity_id(const std::string& subject_id) {
  return "Patient_" + subject_id;
}

EventRecord make_record(std::string activity, Timestamp timestamp,
                        const std::string& subject_id,
                        const std::string& admission_id,
                        std::string entity_type_value) {
  EventRecord record;
  record.activity = std::move(activity);
  record.timestamp = timestamp;
  record.entities.push_back(EntityRef{"Patient", patient_entity_id(subject_id)});
  record.entities.push_back(EntityRef{"Admission", admission_id});
  record.properties.emplace_back("EntityType", std::move(entity_type_value));
  return record;
}

std::string admission_or_outpatient(const std::string& hadm_id) {
  return hadm_id.empty() ? std::string(kOutpatient) : hadm_id;
}

Table load_table(const std::filesystem::path& dir, std::string_view name,
                 char delimiter) {
  Table table;
  table.name = name;
  const auto path = dir / (std::string(name) + ".csv");
  const auto rows = read_tabular(read_file(path), delimiter);
  if (rows.empty()) {
    throw Error(ErrorCode::HeaderMismatch,
                path.string() + ": table file has no header row");
  }
  table.columns = rows[0];
  table.rows.assign(rows.begin() + 1, rows.end());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != table.columns.size()) {
      throw Error(ErrorCode::RaggedRow,
                  path.string() + ": row " + std::to_string(r + 1) +
                      " does not match the header width");
    }
  }
  return table;
}

/// Admit/discharge/death/ED columns per admission, keyed by hadm_id.
struct AdmissionIndex {
  explicit AdmissionIndex(const Table& admissions)
      : table(admissions),
        subject_col(admissions.column_index("subject_id")),
        hadm_col(admissions.column_index("hadm_id")),
        admit_col(admissions.column_index("admittime")) {
    for (std::size_t r = 0; r < admissions.rows.size(); ++r) {
      by_hadm.emplace(admissions.cell(r, hadm_col), r);
    }
  }

  Timestamp admit_time(const std::string& hadm_id) const {
    const auto it = by_hadm.find(hadm_id);
    if (it == by_hadm.end()) {
      throw Error(ErrorCode::MissingAdmitTime,
                  "admission '" + hadm_id + "' is not in ADMISSIONS");
    }
    const std::string& raw = table.cell(it->second, admit_col);
    const auto ts = Timestamp::parse(raw);
    if (!ts) {
      throw Error(ErrorCode::MissingAdmitTime,
                  "admission '" + hadm_id + "' has no parseable admittime ('" +
                      raw + "')");
    }
    return *ts;
  }

  const Table& table;
  std::size_t subject_col;
  std::size_t hadm_col;
  std::size_t admit_col;
  std::unordered_map<std::string, std::size_t> by_hadm;
};

std::int64_t parse_seq(const std::string& raw, std::size_t row) {
  try {
    std::size_t used = 0;
    const std::int64_t value = std::stoll(raw, &used);
    if (used == raw.size()) return value;
  } catch (...) {
  }
  throw Error(ErrorCode::TypeMismatch,
              "DIAGNOSES_ICD row " + std::to_string(row + 1) +
                  ": seq_id '" + raw + "' is not an integer");
}

void check_foreign_keys(const Table& table, const Table& admissions) {
  if (std::find(table.columns.begin(), table.columns.end(), "hadm_id") ==
      table.columns.end())
    return;
  std::unordered_set<std::string> known;
  const std::size_t hadm_col = admissions.column_index("hadm_id");
  for (std::size_t r = 0; r < admissions.rows.size(); ++r) {
    known.insert(admissions.cell(r, hadm_col));
  }
  const std::size_t col = table.column_index("hadm_id");
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& hadm = table.cell(r, col);
    if (!hadm.empty() && !known.contains(hadm)) {
      throw Error(ErrorCode::UnresolvedForeignKey,
                  table.name + " row " + std::to_string(r + 1) +
                      ": hadm_id '" + hadm + "' is not in ADMISSIONS");
    }
  }
}

}  // namespace

std::size_t Table::column_index(std::string_view column) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == column) return i;
  }
  throw Error(ErrorCode::MissingColumn,
              name + ": required column '" + std::string(column) +
                  "' is missing");
}

const std::string& Table::cell(std::size_t row, std::size_t column) const {
  return rows[row][column];
}

RelationalBundle RelationalBundle::load(const std::filesystem::path& dir,
                                        char delimiter) {
  RelationalBundle bundle;
  bundle.patients = load_table(dir, "PATIENTS", delimiter);
  bundle.admissions = load_table(dir, "ADMISSIONS", delimiter);
  bundle.callout = load_table(dir, "CALLOUT", delimiter);
  bundle.services = load_table(dir, "SERVICES", delimiter);
  bundle.icustays = load_table(dir, "ICUSTAYS", delimiter);
  bundle.transfers = load_table(dir, "TRANSFERS", delimiter);
  bundle.d_labitems = load_table(dir, "D_LABITEMS", delimiter);
  bundle.labevents = load_table(dir, "LABEVENTS", delimiter);
  bundle.prescriptions = load_table(dir, "PRESCRIPTIONS", delimiter);
  bundle.diagnoses_icd = load_table(dir, "DIAGNOSES_ICD", delimiter);
  bundle.validate();
  return bundle;
}

void RelationalBundle::save(const std::filesystem::path& dir,
                            char delimiter) const {
  std::filesystem::create_directories(dir);
  for (const Table* table :
       {&patients, &admissions, &callout, &services, &icustays, &transfers,
        &d_labitems, &labevents, &prescriptions, &diagnoses_icd}) {
    std::string text = format_row(table->columns, delimiter);
    for (const auto& row : table->rows) text += format_row(row, delimiter);
    write_file(dir / (table->name + ".csv"), text);
  }
}

void RelationalBundle::validate() const {
  patients.column_index("subject_id");
  for (const char* column : {"subject_id", "hadm_id", "admittime",
                             "dischtime", "deathtime", "edregtime",
                             "edouttime"}) {
    admissions.column_index(column);
  }
  for (const char* column : {"subject_id", "hadm_id", "createtime"}) {
    callout.column_index(column);
  }
  for (const char* column :
       {"subject_id", "hadm_id", "transfertime", "curr_service"}) {
    services.column_index(column);
  }
  for (const char* column :
       {"subject_id", "hadm_id", "intime", "first_careunit"}) {
    icustays.column_index(column);
  }
  for (const char* column : {"subject_id", "hadm_id", "intime",
                             "curr_wardid"}) {
    transfers.column_index(column);
  }
  d_labitems.column_index("itemid");
  d_labitems.column_index("label");
  for (const char* column : {"subject_id", "hadm_id", "itemid", "charttime",
                             "value", "valueuom", "flag"}) {
    labevents.column_index(column);
  }
  for (const char* column : {"subject_id", "hadm_id", "startdate", "enddate",
                             "drug", "dose_val_rx", "dose_unit_rx", "form"}) {
    prescriptions.column_index(column);
  }
  for (const char* column : {"subject_id", "hadm_id", "seq_id", "icd9_code"}) {
    diagnoses_icd.column_index(column);
  }
  for (const Table* table : {&callout, &services, &icustays, &transfers,
                             &labevents, &prescriptions, &diagnoses_icd}) {
    check_foreign_keys(*table, admissions);
  }
}

std::string MimicConfig::label_of(std::string_view code) const {
  for (const auto& [c, label] : code_labels) {
    if (c == code) return label;
  }
  return std::string(code);
}

MimicConfig MimicConfig::from_key_values(const KeyValueFile& kv) {
  MimicConfig config;
  config.code_labels.assign(kv.entries().begin(), kv.entries().end());
  return config;
}

std::vector<std::string> filter_icd(const std::vector<std::string>& codes) {
  std::vector<std::string> kept;
  kept.reserve(codes.size());
  for (const std::string& code : codes) {
    if (!code.empty() && (code[0] == 'E' || code[0] == 'V')) continue;
    kept.push_back(code);
  }
  return kept;
}

std::vector<DiagnosisGroup> diagnosis_groups(const RelationalBundle& bundle) {
  const Table& table = bundle.diagnoses_icd;
  const std::size_t subject_col = table.column_index("subject_id");
  const std::size_t hadm_col = table.column_index("hadm_id");
  const std::size_t seq_col = table.column_index("seq_id");
  const std::size_t code_col = table.column_index("icd9_code");
  const AdmissionIndex admissions(bundle.admissions);

  struct PendingGroup {
    std::string admission_id;
    std::string patient_id;
    std::vector<std::tuple<std::int64_t, std::size_t, std::string>> codes;
  };
  std::vector<PendingGroup> pending;
  std::unordered_map<std::string, std::size_t> slot;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::string& hadm = table.cell(r, hadm_col);
    auto it = slot.find(hadm);
    if (it == slot.end()) {
      it = slot.emplace(hadm, pending.size()).first;
      pending.push_back(
          PendingGroup{hadm, table.cell(r, subject_col), {}});
    }
    pending[it->second].codes.emplace_back(parse_seq(table.cell(r, seq_col), r),
                                           r, table.cell(r, code_col));
  }

  std::vector<DiagnosisGroup> groups;
  for (PendingGroup& p : pending) {
    std::sort(p.codes.begin(), p.codes.end());
    // ordered set: first occurrence by seq order wins
    std::vector<std::string> ordered;
    ordered.reserve(p.codes.size());
    for (auto& [seq, row, code] : p.codes) {
      if (std::find(ordered.begin(), ordered.end(), code) == ordered.end()) {
        ordered.push_back(std::move(code));
      }
    }
    std::vector<std::string> kept = filter_icd(ordered);
    if (kept.empty()) continue;  // nothing survives the E/V rule
    DiagnosisGroup group;
    group.admission_id = p.admission_id;
    group.patient_id = p.patient_id;
    group.codes = std::move(kept);
    group.admit_time = admissions.admit_time(p.admission_id);
    groups.push_back(std::move(group));
  }
  return groups;
}

std::vector<EventRecord> extract_diagnosis_events(
    const RelationalBundle& bundle, const MimicConfig& config,
    std::vector<ExtractionIssue>& issues) {
  (void)issues;  // diagnosis extraction has no recoverable problems
  std::vector<EventRecord> records;
  for (const DiagnosisGroup& group : diagnosis_groups(bundle)) {
    std::string activity;
    for (const std::string& code : group.codes) {
      if (!activity.empty()) activity.push_back(' ');
      activity += config.label_of(code);
    }
    EventRecord record =
        make_record(std::move(activity), group.admit_time, group.patient_id,
                    group.admission_id, "Diagnosis");
    record.source_row = records.size() + 1;
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<EventRecord> extract_logistic_events(
    const RelationalBundle& bundle, std::vector<ExtractionIssue>& issues) {
  std::vector<EventRecord> records;
  auto emit = [&records](EventRecord record) {
    record.source_row = records.size() + 1;
    records.push_back(std::move(record));
  };

  const Table& adm = bundle.admissions;
  const std::size_t subject_col = adm.column_index("subject_id");
  const std::size_t hadm_col = adm.column_index("hadm_id");
  const std::size_t admit_col = adm.column_index("admittime");
  const std::size_t disch_col = adm.column_index("dischtime");
  const std::size_t death_col = adm.column_index("deathtime");
  const std::size_t edreg_col = adm.column_index("edregtime");
  const std::size_t edout_col = adm.column_index("edouttime");

  std::unordered_set<std::string> skipped;
  // Optional timestamp cell; bad content is reported and the event dropped.
  auto optional_time = [&issues](const Table& table, std::size_t row,
                                 std::size_t col, std::string_view what)
      -> std::optional<Timestamp> {
    const std::string& raw = table.cell(row, col);
    if (raw.empty()) return std::nullopt;
    const auto ts = Timestamp::parse(raw);
    if (!ts) {
      issues.push_back(ExtractionIssue{
          ErrorCode::BadTimestamp,
          table.name + " row " + std::to_string(row + 1) + ": bad " +
              std::string(what) + " '" + raw + "'; event skipped"});
      return std::nullopt;
    }
    return ts;
  };

  for (std::size_t r = 0; r < adm.rows.size(); ++r) {
    const std::string& subject = adm.cell(r, subject_col);
    const std::string& hadm = adm.cell(r, hadm_col);
    const std::string& admit_raw = adm.cell(r, admit_col);
    const auto admit = Timestamp::parse(admit_raw);
    if (!admit) {
      throw Error(ErrorCode::MissingAdmitTime,
                  "admission '" + hadm + "' has no parseable admittime ('" +
                      admit_raw + "')");
    }
    const auto disch = optional_time(adm, r, disch_col, "dischtime");
    if (disch && *disch < *admit) {
      issues.push_back(ExtractionIssue{
          ErrorCode::NegativeStay,
          "admission '" + hadm + "': discharge " + disch->to_string() +
              " before admit " + admit->to_string() + "; admission skipped"});
      skipped.insert(hadm);
      continue;
    }
    emit(make_record("HA", *admit, subject, hadm, "Logistic"));
    if (const auto ts = optional_time(adm, r, edreg_col, "edregtime")) {
      emit(make_record("ED Registration", *ts, subject, hadm, "Logistic"));
    }
    if (const auto ts = optional_time(adm, r, edout_col, "edouttime")) {
      emit(make_record("ED Discharge", *ts, subject, hadm, "Logistic"));
    }
    if (const auto ts = optional_time(adm, r, death_col, "deathtime")) {
      emit(make_record("In-hospital Death", *ts, subject, hadm, "Logistic"));
    }
    if (disch) {
      emit(make_record("Discharge", *disch, subject, hadm, "Logistic"));
    }
  }

  auto row_events = [&](const Table& table, std::size_t time_col,
                        auto make_activity) {
    const std::size_t subject_col2 = table.column_index("subject_id");
    const std::size_t hadm_col2 = table.column_index("hadm_id");
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string& hadm = table.cell(r, hadm_col2);
      if (skipped.contains(hadm)) continue;
      const auto ts = optional_time(table, r, time_col, table.columns[time_col]);
      if (!ts) continue;
      std::optional<std::string> activity = make_activity(r);
      if (!activity) continue;
      emit(make_record(std::move(*activity), *ts, table.cell(r, subject_col2),
                       admission_or_outpatient(hadm), "Logistic"));
    }
  };

  row_events(bundle.services, bundle.services.column_index("transfertime"),
             [](std::size_t) { return std::optional<std::string>("TBS"); });
  const std::size_t ward_col = bundle.transfers.column_index("curr_wardid");
  row_events(bundle.transfers, bundle.transfers.column_index("intime"),
             [&](std::size_t r) -> std::optional<std::string> {
               const std::string& ward = bundle.transfers.cell(r, ward_col);
               if (ward.empty()) return std::nullopt;
               return "TIW " + ward;
             });
  const std::size_t unit_col = bundle.icustays.column_index("first_careunit");
  row_events(bundle.icustays, bundle.icustays.column_index("intime"),
             [&](std::size_t r) -> std::optional<std::string> {
               const std::string& unit = bundle.icustays.cell(r, unit_col);
               if (unit.empty()) return std::nullopt;
               return "TIW " + unit;
             });
  row_events(bundle.callout, bundle.callout.column_index("createtime"),
             [](std::size_t) {
               return std::optional<std::string>("Callout Request");
             });
  return records;
}

std::vector<EventRecord> extract_lab_events(
    const RelationalBundle& bundle, std::vector<ExtractionIssue>& issues) {
  const Table& lab = bundle.labevents;
  const std::size_t subject_col = lab.column_index("subject_id");
  const std::size_t hadm_col = lab.column_index("hadm_id");
  const std::size_t item_col = lab.column_index("itemid");
  const std::size_t time_col = lab.column_index("charttime");
  const std::size_t value_col = lab.column_index("value");
  const std::size_t uom_col = lab.column_index("valueuom");
  const std::size_t flag_col = lab.column_index("flag");

  std::unordered_map<std::string, std::string> labels;
  {
    const Table& items = bundle.d_labitems;
    const std::size_t id_col = items.column_index("itemid");
    const std::size_t label_col = items.column_index("label");
    for (std::size_t r = 0; r < items.rows.size(); ++r) {
      labels.emplace(items.cell(r, id_col), items.cell(r, label_col));
    }
  }

  auto is_abnormal = [](const std::string& flag) {
    if (flag.size() != 8) return false;
    static constexpr std::string_view kAbnormal = "abnormal";
    for (std::size_t i = 0; i < flag.size(); ++i) {
      const char c = flag[i];
      const char lower = (c >= 'A' && c <= 'Z') ? char(c - 'A' + 'a') : c;
      if (lower != kAbnormal[i]) return false;
    }
    return true;
  };

  std::vector<EventRecord> records;
  for (std::size_t r = 0; r < lab.rows.size(); ++r) {
    const auto label_it = labels.find(lab.cell(r, item_col));
    if (label_it == labels.end()) {
      issues.push_back(ExtractionIssue{
          ErrorCode::UnknownItemId,
          "LABEVENTS row " + std::to_string(r + 1) + ": itemid '" +
              lab.cell(r, item_col) + "' is not in D_LABITEMS; row skipped"});
      continue;
    }
    const auto ts = Timestamp::parse(lab.cell(r, time_col));
    if (!ts) {
      issues.push_back(ExtractionIssue{
          ErrorCode::BadTimestamp,
          "LABEVENTS row " + std::to_string(r + 1) + ": bad charttime '" +
              lab.cell(r, time_col) + "'; row skipped"});
      continue;
    }
    const std::string admission = admission_or_outpatient(lab.cell(r, hadm_col));
    auto make_lab_record = [&](std::string activity) {
      EventRecord record = make_record(std::move(activity), *ts,
                                       lab.cell(r, subject_col), admission,
                                       "Laboratory_Measurement");
      record.properties.emplace_back("label", label_it->second);
      for (const auto& [key, col] :
           {std::pair<const char*, std::size_t>{"value", value_col},
            {"valueuom", uom_col},
            {"flag", flag_col}}) {
        const std::string& cell = lab.cell(r, col);
        if (!cell.empty()) record.properties.emplace_back(key, cell);
      }
      record.source_row = records.size() + 1;
      records.push_back(std::move(record));
    };
    make_lab_record("L_Taken");
    if (is_abnormal(lab.cell(r, flag_col))) {
      make_lab_record("LAM");
    }
  }
  return records;
}

std::vector<EventRecord> extract_prescription_events(
    const RelationalBundle& bundle, std::vector<ExtractionIssue>& issues) {
  const Table& rx = bundle.prescriptions;
  const std::size_t subject_col = rx.column_index("subject_id");
  const std::size_t hadm_col = rx.column_index("hadm_id");
  const std::size_t start_col = rx.column_index("startdate");
  const std::size_t end_col = rx.column_index("enddate");
  const std::size_t drug_col = rx.column_index("drug");
  const std::size_t dose_col = rx.column_index("dose_val_rx");
  const std::size_t unit_col = rx.column_index("dose_unit_rx");
  const std::size_t form_col = rx.column_index("form");

  std::vector<EventRecord> records;
  for (std::size_t r = 0; r < rx.rows.size(); ++r) {
    const auto start = Timestamp::parse(rx.cell(r, start_col));
    const auto end = Timestamp::parse(rx.cell(r, end_col));
    if (!start || !end) {
      issues.push_back(ExtractionIssue{
          ErrorCode::BadTimestamp,
          "PRESCRIPTIONS row " + std::to_string(r + 1) +
              ": bad start/end date; row skipped"});
      continue;
    }
    if (*end < *start) {
      issues.push_back(ExtractionIssue{
          ErrorCode::EndBeforeStart,
          "PRESCRIPTIONS row " + std::to_string(r + 1) + ": end " +
              end->to_string() + " before start " + start->to_string() +
              "; row skipped"});
      continue;
    }
    const std::string& drug = rx.cell(r, drug_col);
    const std::string admission = admission_or_outpatient(rx.cell(r, hadm_col));
    auto make_rx_record = [&](std::string_view prefix, Timestamp ts) {
      EventRecord record =
          make_record(std::string(prefix) + " " + drug, ts,
                      rx.cell(r, subject_col), admission, "Prescriptions");
      for (const auto& [key, col] :
           {std::pair<const char*, std::size_t>{"dose_val_rx", dose_col},
            {"dose_unit_rx", unit_col},
            {"form", form_col}}) {
        const std::string& cell = rx.cell(r, col);
        if (!cell.empty()) record.properties.emplace_back(key, cell);
      }
      record.source_row = records.size() + 1;
      records.push_back(std::move(record));
    };
    make_rx_record("Rx Start", *start);
    make_rx_record("Rx End", *end);
  }
  return records;
}

std::vector<CohortRow> cohort_table(std::span<const DiagnosisGroup> groups) {
  std::map<std::vector<std::string>, CohortRow> rows;
  for (const DiagnosisGroup& group : groups) {
    std::vector<std::string> canonical = group.codes;
    std::sort(canonical.begin(), canonical.end());
    canonical.erase(std::unique(canonical.begin(), canonical.end()),
                    canonical.end());
    auto it = rows.find(canonical);
    if (it == rows.end()) {
      it = rows.emplace(canonical, CohortRow{canonical, 0, {}}).first;
    }
    ++it->second.frequency;
    it->second.admission_ids.push_back(group.admission_id);
  }
  std::vector<CohortRow> result;
  result.reserve(rows.size());
  for (auto& [key, row] : rows) result.push_back(std::move(row));
  std::stable_sort(result.begin(), result.end(),
                   [](const CohortRow& a, const CohortRow& b) {
                     if (a.frequency != b.frequency)
                       return a.frequency > b.frequency;
                     return a.code_set < b.code_set;
                   });
  return result;
}

std::vector<EventRecord> assemble_log(
    std::vector<std::vector<EventRecord>> streams) {
  struct Keyed {
    EventRecord record;
    std::size_t priority;
  };
  std::vector<Keyed> keyed;
  for (std::size_t s = 0; s < streams.size(); ++s) {
    for (EventRecord& record : streams[s]) {
      keyed.push_back(Keyed{std::move(record), s});
    }
  }
  std::stable_sort(keyed.begin(), keyed.end(),
                   [](const Keyed& a, const Keyed& b) {
                     static const std::string empty;
                     const std::string* pa = a.record.entity_id_of("Patient");
                     const std::string* pb = b.record.entity_id_of("Patient");
                     return std::tie(pa ? *pa : empty, a.record.timestamp,
                                     a.priority, a.record.source_row) <
                            std::tie(pb ? *pb : empty, b.record.timestamp,
                                     b.priority, b.record.source_row);
                   });
  std::vector<EventRecord> result;
  result.reserve(keyed.size());
  for (Keyed& k : keyed) {
    k.record.source_row = result.size() + 1;
    result.push_back(std::move(k.record));
  }
  return result;
}

Extraction extract_all(const RelationalBundle& bundle,
                       const MimicConfig& config) {
  Extraction extraction;
  extraction.groups = diagnosis_groups(bundle);
  std::vector<std::vector<EventRecord>> streams;
  streams.push_back(
      extract_diagnosis_events(bundle, config, extraction.issues));
  streams.push_back(extract_logistic_events(bundle, extraction.issues));
  streams.push_back(extract_lab_events(bundle, extraction.issues));
  streams.push_back(extract_prescription_events(bundle, extraction.issues));
  extraction.records = assemble_log(std::move(streams));
  return extraction;
}

LogSchema mimic_log_schema() {
  LogSchema schema;
  schema.activity_column = "Event";
  schema.timestamp_column = "Timestamps";
  schema.entity_columns = {"Patient", "Admission"};
  schema.property_columns = {"EntityType", "label",       "value",
                             "valueuom",   "flag",        "dose_val_rx",
                             "dose_unit_rx", "form"};
  return schema;
}

}  // namespace medfg
