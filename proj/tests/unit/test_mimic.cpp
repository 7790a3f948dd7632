#include "medfg/mimic.hpp"

#include <map>
#include <set>

#include "doctest.h"
#include "testutil.hpp"

using namespace medfg;

namespace {

/// Minimal bundle with empty optional tables; tests fill in what they need.
RelationalBundle empty_bundle() {
  RelationalBundle bundle;
  bundle.patients = Table{"PATIENTS", {"subject_id", "gender", "dob"}, {}};
  bundle.admissions =
      Table{"ADMISSIONS",
            {"subject_id", "hadm_id", "admittime", "dischtime", "deathtime",
             "edregtime", "edouttime"},
            {}};
  bundle.callout = Table{"CALLOUT", {"subject_id", "hadm_id", "createtime"}, {}};
  bundle.services =
      Table{"SERVICES",
            {"subject_id", "hadm_id", "transfertime", "prev_service",
             "curr_service"},
            {}};
  bundle.icustays = Table{
      "ICUSTAYS",
      {"subject_id", "hadm_id", "intime", "outtime", "first_careunit"},
      {}};
  bundle.transfers =
      Table{"TRANSFERS", {"subject_id", "hadm_id", "intime", "curr_wardid"}, {}};
  bundle.d_labitems = Table{"D_LABITEMS", {"itemid", "label"}, {}};
  bundle.labevents = Table{"LABEVENTS",
                           {"subject_id", "hadm_id", "itemid", "charttime",
                            "value", "valueuom", "flag"},
                           {}};
  bundle.prescriptions =
      Table{"PRESCRIPTIONS",
            {"subject_id", "hadm_id", "startdate", "enddate", "drug",
             "dose_val_rx", "dose_unit_rx", "form"},
            {}};
  bundle.diagnoses_icd = Table{
      "DIAGNOSES_ICD", {"subject_id", "hadm_id", "seq_id", "icd9_code"}, {}};
  return bundle;
}

void add_admission(RelationalBundle& bundle, const std::string& subject,
                   const std::string& hadm, const std::string& admit,
                   const std::string& disch) {
  bundle.patients.rows.push_back({subject, "F", "1950-01-01T00:00:00"});
  bundle.admissions.rows.push_back({subject, hadm, admit, disch, "", "", ""});
}

}  // namespace

TEST_CASE("filter_icd drops E and V codes, keeps order, is idempotent") {
  CHECK(filter_icd({"7746", "E8889", "V3000"}) ==
        std::vector<std::string>{"7746"});
  CHECK(filter_icd({}) == std::vector<std::string>{});

  testutil::TestRng rng(3);
  std::vector<std::string> codes;
  const std::string alphabet = "EVABX0123456789";
  for (int i = 0; i < 1000; ++i) {
    std::string code;
    for (std::size_t j = 0; j < 1 + rng.below(5); ++j) {
      code.push_back(alphabet[rng.below(alphabet.size())]);
    }
    codes.push_back(std::move(code));
  }
  const auto filtered = filter_icd(codes);
  std::vector<std::string> expected;
  for (const std::string& code : codes) {
    if (code[0] != 'E' && code[0] != 'V') expected.push_back(code);
  }
  CHECK(filtered == expected);
  CHECK(filter_icd(filtered) == filtered);
}

TEST_CASE("diagnosis events join labeled codes by seq order at admit time") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "4900", "115281", "2013-10-31T07:00:00",
                "2013-11-10T07:00:00");
  // out-of-order seq ids on purpose
  bundle.diagnoses_icd.rows.push_back({"4900", "115281", "2", "25000"});
  bundle.diagnoses_icd.rows.push_back({"4900", "115281", "1", "41401"});
  bundle.diagnoses_icd.rows.push_back({"4900", "115281", "3", "2720"});
  bundle.diagnoses_icd.rows.push_back({"4900", "115281", "4", "4019"});

  MimicConfig config;
  config.code_labels = {{"41401", "CA"}, {"25000", "DM"}, {"2720", "HL"},
                        {"4019", "HT"}};
  std::vector<ExtractionIssue> issues;
  const auto records = extract_diagnosis_events(bundle, config, issues);
  REQUIRE(records.size() == 1);
  CHECK(records[0].activity == "CA DM HL HT");
  CHECK(records[0].timestamp.to_string() == "2013-10-31T07:00:00");
  CHECK(records[0].entities[0] == EntityRef{"Patient", "Patient_4900"});
  CHECK(records[0].entities[1] == EntityRef{"Admission", "115281"});
  CHECK(*records[0].property("EntityType") == "Diagnosis");
  CHECK(issues.empty());
}

TEST_CASE("duplicate codes within an admission are kept once") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "1", "100", "2013-01-01T00:00:00",
                "2013-01-05T00:00:00");
  bundle.diagnoses_icd.rows.push_back({"1", "100", "1", "7746"});
  bundle.diagnoses_icd.rows.push_back({"1", "100", "2", "4019"});
  bundle.diagnoses_icd.rows.push_back({"1", "100", "3", "7746"});
  const auto groups = diagnosis_groups(bundle);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].codes == std::vector<std::string>{"7746", "4019"});
}

TEST_CASE("admission with only E and V codes produces no diagnosis event") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "1", "100", "2013-01-01T00:00:00",
                "2013-01-05T00:00:00");
  bundle.diagnoses_icd.rows.push_back({"1", "100", "1", "E8889"});
  bundle.diagnoses_icd.rows.push_back({"1", "100", "2", "V3000"});
  std::vector<ExtractionIssue> issues;
  CHECK(extract_diagnosis_events(bundle, {}, issues).empty());
}

TEST_CASE("diagnosis extraction equals a hand-rolled join oracle") {
  RelationalBundle bundle = empty_bundle();
  testutil::TestRng rng(17);
  const std::vector<std::string> codes = {"7746", "7661", "E8889", "V053",
                                          "4019"};
  std::map<std::string, std::string> admit_of;
  for (int a = 0; a < 5; ++a) {
    const std::string subject = std::to_string(10 + a % 3);
    const std::string hadm = std::to_string(500 + a);
    const std::string admit =
        "2013-03-0" + std::to_string(a + 1) + "T08:00:00";
    add_admission(bundle, subject, hadm, admit, "2013-04-01T00:00:00");
    admit_of[hadm] = admit;
    const std::size_t n = 1 + rng.below(4);
    for (std::size_t i = 0; i < n; ++i) {
      bundle.diagnoses_icd.rows.push_back(
          {subject, hadm, std::to_string(i + 1),
           codes[rng.below(codes.size())]});
    }
  }

  // oracle: group rows per admission in file order, dedupe, drop E/V, join
  std::map<std::string, std::vector<std::string>> grouped;
  std::vector<std::string> order;
  for (const auto& row : bundle.diagnoses_icd.rows) {
    if (grouped.find(row[1]) == grouped.end()) order.push_back(row[1]);
    auto& codes = grouped[row[1]];
    if (row[3][0] == 'E' || row[3][0] == 'V') continue;
    if (std::find(codes.begin(), codes.end(), row[3]) == codes.end()) {
      codes.push_back(row[3]);
    }
  }

  std::vector<ExtractionIssue> issues;
  const auto records = extract_diagnosis_events(bundle, {}, issues);
  std::size_t expected_count = 0;
  std::size_t index = 0;
  for (const std::string& hadm : order) {
    if (grouped[hadm].empty()) continue;
    ++expected_count;
    std::string activity;
    for (const std::string& code : grouped[hadm]) {
      if (!activity.empty()) activity.push_back(' ');
      activity += code;
    }
    REQUIRE(index < records.size());
    CHECK(records[index].activity == activity);
    CHECK(records[index].timestamp.to_string() == admit_of[hadm]);
    ++index;
  }
  CHECK(records.size() == expected_count);
}

TEST_CASE("minimal admission yields exactly HA and Discharge") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "7", "700", "2013-05-01T10:00:00",
                "2013-05-04T12:00:00");
  std::vector<ExtractionIssue> issues;
  const auto records = extract_logistic_events(bundle, issues);
  REQUIRE(records.size() == 2);
  CHECK(records[0].activity == "HA");
  CHECK(records[1].activity == "Discharge");
  CHECK(issues.empty());
}

TEST_CASE("logistic extraction emits service and ward transfer rows") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "4900", "115281", "2013-10-01T07:00:00",
                "2013-11-01T07:00:00");
  bundle.services.rows.push_back(
      {"4900", "115281", "2013-10-01T08:00:00", "", "MED"});
  bundle.transfers.rows.push_back(
      {"4900", "115281", "2013-10-19T09:00:00", "27"});
  std::vector<ExtractionIssue> issues;
  const auto records = extract_logistic_events(bundle, issues);
  REQUIRE(records.size() == 4);
  CHECK(records[2].activity == "TBS");
  CHECK(records[2].timestamp.to_string() == "2013-10-01T08:00:00");
  CHECK(records[3].activity == "TIW 27");
  CHECK(records[3].timestamp.to_string() == "2013-10-19T09:00:00");
  for (const auto& record : records) {
    CHECK(*record.property("EntityType") == "Logistic");
    CHECK(record.entities[1] == EntityRef{"Admission", "115281"});
  }
}

TEST_CASE("negative stay is reported and the admission skipped") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "1", "100", "2013-05-10T00:00:00",
                "2013-05-01T00:00:00");  // discharge before admit
  bundle.callout.rows.push_back({"1", "100", "2013-05-02T00:00:00"});
  add_admission(bundle, "2", "200", "2013-06-01T00:00:00",
                "2013-06-03T00:00:00");
  std::vector<ExtractionIssue> issues;
  const auto records = extract_logistic_events(bundle, issues);
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].code == ErrorCode::NegativeStay);
  REQUIRE(records.size() == 2);  // only admission 200's HA/Discharge
  for (const auto& record : records) {
    CHECK(record.entities[1] == EntityRef{"Admission", "200"});
  }
}

TEST_CASE("logistic event multiset equals a row enumeration oracle") {
  RelationalBundle bundle = empty_bundle();
  for (int a = 0; a < 3; ++a) {
    const std::string subject = std::to_string(a);
    const std::string hadm = std::to_string(900 + a);
    add_admission(bundle, subject, hadm,
                  "2013-07-0" + std::to_string(a + 1) + "T00:00:00",
                  "2013-07-2" + std::to_string(a + 1) + "T00:00:00");
    for (int t = 0; t < 2; ++t) {
      bundle.transfers.rows.push_back(
          {subject, hadm,
           "2013-07-0" + std::to_string(a + 2) + "T0" + std::to_string(t) +
               ":00:00",
           std::to_string(10 + t)});
    }
  }
  std::vector<ExtractionIssue> issues;
  const auto records = extract_logistic_events(bundle, issues);
  // oracle: 2 per admission from ADMISSIONS + one per TRANSFERS row
  CHECK(records.size() ==
        bundle.admissions.rows.size() * 2 + bundle.transfers.rows.size());
  std::multiset<std::string> activities;
  for (const auto& record : records) activities.insert(record.activity);
  CHECK(activities.count("HA") == 3);
  CHECK(activities.count("Discharge") == 3);
  CHECK(activities.count("TIW 10") == 3);
  CHECK(activities.count("TIW 11") == 3);
}

TEST_CASE("outpatient abnormal lab row yields two events") {
  RelationalBundle bundle = empty_bundle();
  bundle.patients.rows.push_back({"4900", "F", "1950-01-01T00:00:00"});
  bundle.d_labitems.rows.push_back({"50912", "Creatinine"});
  bundle.labevents.rows.push_back({"4900", "", "50912", "2013-10-29T05:00:00",
                                   "1.8", "mg/dL", "abnormal"});
  std::vector<ExtractionIssue> issues;
  const auto records = extract_lab_events(bundle, issues);
  REQUIRE(records.size() == 2);
  CHECK(records[0].activity == "L_Taken");
  CHECK(records[1].activity == "LAM");
  for (const auto& record : records) {
    CHECK(record.entities[1] == EntityRef{"Admission", "Outpatient"});
    CHECK(*record.property("label") == "Creatinine");
    CHECK(*record.property("value") == "1.8");
    CHECK(*record.property("valueuom") == "mg/dL");
    CHECK(*record.property("flag") == "abnormal");
  }
  CHECK(records[0].timestamp == records[1].timestamp);
}

TEST_CASE("normal lab row yields a single L_Taken event") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "1", "100", "2013-01-01T00:00:00",
                "2013-01-09T00:00:00");
  bundle.d_labitems.rows.push_back({"50931", "Glucose"});
  bundle.labevents.rows.push_back(
      {"1", "100", "50931", "2013-01-02T06:00:00", "95", "mg/dL", ""});
  std::vector<ExtractionIssue> issues;
  const auto records = extract_lab_events(bundle, issues);
  REQUIRE(records.size() == 1);
  CHECK(records[0].activity == "L_Taken");
  CHECK(records[0].property("flag") == nullptr);
}

TEST_CASE("lab event counting: 20 rows with 7 abnormal gives 27 events") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "1", "100", "2013-01-01T00:00:00",
                "2013-02-01T00:00:00");
  bundle.d_labitems.rows.push_back({"50912", "Creatinine"});
  for (int i = 0; i < 20; ++i) {
    bundle.labevents.rows.push_back(
        {"1", "100", "50912",
         "2013-01-0" + std::to_string(1 + i % 9) + "T06:00:00", "1.0", "mg/dL",
         i < 7 ? "abnormal" : ""});
  }
  std::vector<ExtractionIssue> issues;
  CHECK(extract_lab_events(bundle, issues).size() == 27);
}

TEST_CASE("unknown itemid is reported and the row skipped") {
  RelationalBundle bundle = empty_bundle();
  bundle.patients.rows.push_back({"1", "F", "1950-01-01T00:00:00"});
  bundle.labevents.rows.push_back(
      {"1", "", "99999", "2013-01-02T06:00:00", "1", "u", ""});
  std::vector<ExtractionIssue> issues;
  CHECK(extract_lab_events(bundle, issues).empty());
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].code == ErrorCode::UnknownItemId);
}

TEST_CASE("prescriptions yield start and end event pairs") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "1", "100", "2013-01-01T00:00:00",
                "2013-02-01T00:00:00");
  bundle.prescriptions.rows.push_back({"1", "100", "2013-01-02T08:00:00",
                                       "2013-01-09T08:00:00", "Aspirin", "81",
                                       "mg", "TAB"});
  std::vector<ExtractionIssue> issues;
  const auto records = extract_prescription_events(bundle, issues);
  REQUIRE(records.size() == 2);
  CHECK(records[0].activity == "Rx Start Aspirin");
  CHECK(records[1].activity == "Rx End Aspirin");
  CHECK(records[0].timestamp <= records[1].timestamp);
  CHECK(*records[0].property("dose_val_rx") == "81");
  CHECK(*records[0].property("dose_unit_rx") == "mg");
  CHECK(*records[0].property("form") == "TAB");
  CHECK(*records[0].property("EntityType") == "Prescriptions");
}

TEST_CASE("prescription with equal start and end keeps both events") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "1", "100", "2013-01-01T00:00:00",
                "2013-02-01T00:00:00");
  bundle.prescriptions.rows.push_back({"1", "100", "2013-01-02T08:00:00",
                                       "2013-01-02T08:00:00", "Heparin",
                                       "5000", "UNIT", "VIAL"});
  std::vector<ExtractionIssue> issues;
  const auto records = extract_prescription_events(bundle, issues);
  REQUIRE(records.size() == 2);
  CHECK(records[0].timestamp == records[1].timestamp);
}

TEST_CASE("prescription end before start is reported and skipped") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "1", "100", "2013-01-01T00:00:00",
                "2013-02-01T00:00:00");
  bundle.prescriptions.rows.push_back({"1", "100", "2013-01-09T08:00:00",
                                       "2013-01-02T08:00:00", "Aspirin", "81",
                                       "mg", "TAB"});
  std::vector<ExtractionIssue> issues;
  CHECK(extract_prescription_events(bundle, issues).empty());
  REQUIRE(issues.size() == 1);
  CHECK(issues[0].code == ErrorCode::EndBeforeStart);
}

TEST_CASE("ten prescription rows pair up into twenty events") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "1", "100", "2013-01-01T00:00:00",
                "2013-03-01T00:00:00");
  for (int i = 0; i < 10; ++i) {
    const std::string day = std::to_string(2 + i);
    bundle.prescriptions.rows.push_back(
        {"1", "100", "2013-01-" + (day.size() == 1 ? "0" + day : day) +
                         "T08:00:00",
         "2013-02-01T08:00:00", "Drug" + std::to_string(i), "1", "mg", "TAB"});
  }
  std::vector<ExtractionIssue> issues;
  const auto records = extract_prescription_events(bundle, issues);
  REQUIRE(records.size() == 20);
  for (int i = 0; i < 10; ++i) {
    const std::string name = "Drug" + std::to_string(i);
    CHECK(records[2 * i].activity == "Rx Start " + name);
    CHECK(records[2 * i + 1].activity == "Rx End " + name);
  }
}

TEST_CASE("cohort_table groups by canonical code set") {
  CHECK(cohort_table({}).empty());

  std::vector<DiagnosisGroup> groups;
  auto add_group = [&groups](const std::string& hadm,
                             std::vector<std::string> codes) {
    DiagnosisGroup group;
    group.admission_id = hadm;
    group.patient_id = "p";
    group.codes = std::move(codes);
    group.admit_time = Timestamp{0};
    groups.push_back(std::move(group));
  };
  // six groups over three distinct sets; one uses a different code order
  add_group("A1", {"7746"});
  add_group("B1", {"76519", "76528"});
  add_group("A2", {"7746"});
  add_group("B2", {"76528", "76519"});
  add_group("C1", {"7706"});
  add_group("A3", {"7746"});

  const auto rows = cohort_table(groups);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].code_set == std::vector<std::string>{"7746"});
  CHECK(rows[0].frequency == 3);
  CHECK(rows[0].admission_ids == std::vector<std::string>{"A1", "A2", "A3"});
  CHECK(rows[1].code_set == std::vector<std::string>{"76519", "76528"});
  CHECK(rows[1].frequency == 2);
  CHECK(rows[2].frequency == 1);

  // map-tally oracle + conservation of group count
  std::map<std::vector<std::string>, std::size_t> tally;
  for (auto group : groups) {
    std::sort(group.codes.begin(), group.codes.end());
    ++tally[group.codes];
  }
  std::size_t total = 0;
  for (const auto& row : rows) {
    CHECK(tally.at(row.code_set) == row.frequency);
    total += row.frequency;
  }
  CHECK(total == groups.size());
}

TEST_CASE("assemble_log sorts by patient, time, stream priority, row") {
  auto record = [](const std::string& patient, const std::string& activity,
                   const std::string& ts, std::size_t row) {
    EventRecord r;
    r.activity = activity;
    r.timestamp = *Timestamp::parse(ts);
    r.entities = {EntityRef{"Patient", patient}, EntityRef{"Admission", "1"}};
    r.source_row = row;
    return r;
  };

  SUBCASE("single record passes through unchanged except renumbering") {
    auto one = record("P1", "HA", "2013-01-01T00:00:00", 9);
    const auto out = assemble_log({{one}});
    REQUIRE(out.size() == 1);
    CHECK(out[0].activity == "HA");
    CHECK(out[0].source_row == 1);
  }

  SUBCASE("equal timestamps put the diagnosis stream first") {
    auto diagnosis = record("P1", "CA DM", "2013-01-01T08:00:00", 1);
    auto logistic = record("P1", "HA", "2013-01-01T08:00:00", 1);
    const auto out = assemble_log({{diagnosis}, {logistic}});
    REQUIRE(out.size() == 2);
    CHECK(out[0].activity == "CA DM");
    CHECK(out[1].activity == "HA");
  }

  SUBCASE("output is a permutation of the inputs") {
    std::vector<EventRecord> a = {
        record("P2", "x", "2013-01-03T00:00:00", 1),
        record("P1", "y", "2013-01-02T00:00:00", 2),
    };
    std::vector<EventRecord> b = {
        record("P1", "z", "2013-01-01T00:00:00", 1),
    };
    const auto out = assemble_log({a, b});
    REQUIRE(out.size() == 3);
    std::multiset<std::string> in_activities = {"x", "y", "z"};
    std::multiset<std::string> out_activities;
    for (const auto& r : out) {
      out_activities.insert(r.activity);
      CHECK(r.entity_id_of("Patient") != nullptr);
      CHECK(r.entity_id_of("Admission") != nullptr);
    }
    CHECK(in_activities == out_activities);
    CHECK(out[0].activity == "z");  // P1 earliest
    CHECK(out[1].activity == "y");
    CHECK(out[2].activity == "x");  // P2 after P1
    CHECK(out[0].source_row == 1);
    CHECK(out[2].source_row == 3);
  }
}

TEST_CASE("extract_all output always carries Patient and Admission refs") {
  RelationalBundle bundle = empty_bundle();
  add_admission(bundle, "1", "100", "2013-01-01T08:00:00",
                "2013-01-09T08:00:00");
  bundle.diagnoses_icd.rows.push_back({"1", "100", "1", "7746"});
  bundle.d_labitems.rows.push_back({"50912", "Creatinine"});
  bundle.labevents.rows.push_back(
      {"1", "", "50912", "2012-12-01T06:00:00", "1.1", "mg/dL", "abnormal"});
  bundle.prescriptions.rows.push_back({"1", "100", "2013-01-02T08:00:00",
                                       "2013-01-03T08:00:00", "Aspirin", "81",
                                       "mg", "TAB"});
  const auto extraction = extract_all(bundle, {});
  CHECK(extraction.records.size() == 7);  // DX + HA/Disch + 2 lab + 2 rx
  for (std::size_t i = 0; i < extraction.records.size(); ++i) {
    const EventRecord& record = extraction.records[i];
    CHECK(record.source_row == i + 1);
    CHECK(record.entity_id_of("Patient") != nullptr);
    CHECK(record.entity_id_of("Admission") != nullptr);
  }
  CHECK(extraction.issues.empty());
  // diagnosis precedes HA at the same admit timestamp
  CHECK(extraction.records[2].activity == "7746");
  CHECK(extraction.records[3].activity == "HA");
}
