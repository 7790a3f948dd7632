#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "medfg/errors.hpp"
#include "medfg/log.hpp"
#include "medfg/timestamp.hpp"

namespace medfg {

/// One relational table export: header plus rows of string cells.
struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column_index(std::string_view column) const;  // MissingColumn
  const std::string& cell(std::size_t row, std::size_t column) const;
};

/// The MIMIC-shaped table subset the extraction works from. Loaded from one
/// delimiter-separated file per table, named <TABLE>.csv.
struct RelationalBundle {
  Table patients;       // subject_id, gender, dob
  Table admissions;     // subject_id, hadm_id, admittime, dischtime,
                        // deathtime, edregtime, edouttime
  Table callout;        // subject_id, hadm_id, createtime
  Table services;       // subject_id, hadm_id, transfertime, prev_service,
                        // curr_service
  Table icustays;       // subject_id, hadm_id, intime, outtime, first_careunit
  Table transfers;      // subject_id, hadm_id, intime, curr_wardid
  Table d_labitems;     // itemid, label
  Table labevents;      // subject_id, hadm_id, itemid, charttime, value,
                        // valueuom, flag
  Table prescriptions;  // subject_id, hadm_id, startdate, enddate, drug,
                        // dose_val_rx, dose_unit_rx, form
  Table diagnoses_icd;  // subject_id, hadm_id, seq_id, icd9_code

  static RelationalBundle load(const std::filesystem::path& dir,
                               char delimiter = ',');
  void save(const std::filesystem::path& dir, char delimiter = ',') const;

  /// Required columns present and every non-empty hadm_id resolvable
  /// against ADMISSIONS.
  void validate() const;
};

/// ICD codes of one admission after E/V filtering, ordered by seq_id.
struct DiagnosisGroup {
  std::string admission_id;
  std::string patient_id;  // subject_id
  std::vector<std::string> codes;
  Timestamp admit_time;
};

/// One row of the cohort table: admissions sharing a canonical code set.
struct CohortRow {
  std::vector<std::string> code_set;  // sorted, deduplicated
  std::size_t frequency = 0;
  std::vector<std::string> admission_ids;
};

/// Recoverable extraction problem: the offending row/admission was skipped.
struct ExtractionIssue {
  ErrorCode code;
  std::string detail;
};

/// Optional mapping of ICD codes to short labels used in diagnosis
/// activities ("CA DM HL HT"); unknown codes keep their raw value.
struct MimicConfig {
  std::vector<std::pair<std::string, std::string>> code_labels;

  std::string label_of(std::string_view code) const;
  static MimicConfig from_key_values(const KeyValueFile& kv);
};

/// Drops codes whose first character is 'E' or 'V', preserving order.
/// Idempotent.
std::vector<std::string> filter_icd(const std::vector<std::string>& codes);

/// DIAGNOSES_ICD grouped per admission (first-appearance order), codes
/// ordered by seq_id then row, E/V codes removed, empty groups dropped.
/// Throws MissingAdmitTime when an admission's admit time is absent.
std::vector<DiagnosisGroup> diagnosis_groups(const RelationalBundle& bundle);

/// One event per diagnosed admission at its admit time; the activity is the
/// space-joined label list.
std::vector<EventRecord> extract_diagnosis_events(
    const RelationalBundle& bundle, const MimicConfig& config,
    std::vector<ExtractionIssue>& issues);

/// Admission/discharge/ED/death/callout/service-transfer/ward-transfer
/// events per admission. Admissions with discharge before admit are
/// reported as NegativeStay and skipped entirely.
std::vector<EventRecord> extract_logistic_events(
    const RelationalBundle& bundle, std::vector<ExtractionIssue>& issues);

/// L_Taken per LABEVENTS row plus LAM when the flag marks it abnormal.
/// Rows with unknown itemids are reported and skipped. A missing hadm_id
/// maps to the Outpatient admission.
std::vector<EventRecord> extract_lab_events(const RelationalBundle& bundle,
                                            std::vector<ExtractionIssue>& issues);

/// "Rx Start <drug>" / "Rx End <drug>" per PRESCRIPTIONS row; rows with end
/// before start are reported and skipped.
std::vector<EventRecord> extract_prescription_events(
    const RelationalBundle& bundle, std::vector<ExtractionIssue>& issues);

/// Groups admissions by canonical code set; rows sorted by descending
/// frequency, ties by code set.
std::vector<CohortRow> cohort_table(std::span<const DiagnosisGroup> groups);

/// Concatenates the per-entity streams and sorts by (patient, timestamp,
/// stream priority, source row), where priority is the list position:
/// Diagnosis < Logistic < Laboratory < Prescriptions. Records are
/// renumbered 1..N afterwards. The output is a permutation of the inputs.
std::vector<EventRecord> assemble_log(
    std::vector<std::vector<EventRecord>> streams);

struct Extraction {
  std::vector<EventRecord> records;
  std::vector<ExtractionIssue> issues;
  std::vector<DiagnosisGroup> groups;
};

/// The four extractions plus assemble_log.
Extraction extract_all(const RelationalBundle& bundle,
                       const MimicConfig& config);

/// Column layout of logs written by the extraction pipeline.
LogSchema mimic_log_schema();

}  // namespace medfg
