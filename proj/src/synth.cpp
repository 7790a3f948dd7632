#include "medfg/synth.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <string>

namespace medfg {
namespace {

/// Thin wrapper over mt19937_64 with fixed derivations, so generated data
/// depends only on the seed stream and not on library distribution details.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

  double unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool chance(double p) { return unit() < p; }

  template <typename T, std::size_t N>
  const T& pick(const std::array<T, N>& items) {
    return items[below(N)];
  }

 private:
  std::mt19937_64 engine_;
};

constexpr std::int64_t kBaseTime = 1356998400;  // 2013-01-01T00:00:00
constexpr std::int64_t kHour = 3600;
constexpr std::int64_t kDay = 86400;

struct LabItem {
  const char* itemid;
  const char* label;
  const char* uom;
};
constexpr std::array<LabItem, 5> kLabItems = {{
    {"50912", "Creatinine", "mg/dL"},
    {"50931", "Glucose", "mg/dL"},
    {"51221", "Hematocrit", "%"},
    {"50983", "Sodium", "mEq/L"},
    {"50971", "Potassium", "mEq/L"},
}};

struct Drug {
  const char* name;
  const char* dose;
  const char* unit;
  const char* form;
};
constexpr std::array<Drug, 5> kDrugs = {{
    {"Aspirin", "81", "mg", "TAB"},
    {"Metformin", "500", "mg", "TAB"},
    {"Lisinopril", "10", "mg", "TAB"},
    {"Heparin", "5000", "UNIT", "VIAL"},
    {"Insulin", "10", "UNIT", "VIAL"},
}};

// Table 3 codes first so cohort grouping has recognizable keys.
constexpr std::array<const char*, 10> kIcdCodes = {
    "7746", "7661", "7706", "76519", "76528",
    "77089", "4019", "25000", "41401", "4280"};
constexpr std::array<const char*, 4> kExternalIcdCodes = {"E8889", "V3000",
                                                          "V053", "E9342"};

constexpr std::array<const char*, 5> kServices = {"MED", "SURG", "CMED", "NB",
                                                  "OBS"};
constexpr std::array<const char*, 5> kWards = {"12", "27", "33", "45", "52"};
constexpr std::array<const char*, 4> kCareUnits = {"MICU", "SICU", "CCU",
                                                   "CSRU"};

std::string time_string(std::int64_t seconds) {
  return Timestamp{seconds}.to_string();
}

}  // namespace

void SynthParams::validate() const {
  const struct {
    const char* name;
    double value;
  } rates[] = {
      {"multimorbid_rate", multimorbid_rate},
      {"readmission_rate", readmission_rate},
      {"transfer_rate", transfer_rate},
      {"lab_rate", lab_rate},
      {"abnormal_rate", abnormal_rate},
      {"prescription_rate", prescription_rate},
      {"outpatient_lab_rate", outpatient_lab_rate},
      {"ed_rate", ed_rate},
      {"callout_rate", callout_rate},
      {"death_rate", death_rate},
  };
  for (const auto& rate : rates) {
    if (!(rate.value >= 0.0 && rate.value <= 1.0)) {
      throw Error(ErrorCode::BadRate,
                  std::string(rate.name) + " must be in [0,1], got " +
                      std::to_string(rate.value));
    }
  }
}

RelationalBundle generate_bundle(std::uint64_t seed, std::size_t n_patients,
                                 const SynthParams& params) {
  params.validate();
  if (n_patients < 1) {
    throw Error(ErrorCode::BadRate, "n_patients must be at least 1");
  }

  Rng rng(seed);
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

  for (const LabItem& item : kLabItems) {
    bundle.d_labitems.rows.push_back({item.itemid, item.label});
  }

  std::size_t hadm_counter = 100000;
  for (std::size_t p = 0; p < n_patients; ++p) {
    const std::string subject = std::to_string(1000 + p);
    const std::string gender = rng.chance(0.5) ? "M" : "F";
    const std::int64_t dob =
        kBaseTime - static_cast<std::int64_t>(20 + rng.below(60)) * 365 * kDay;
    bundle.patients.rows.push_back({subject, gender, time_string(dob)});

    std::size_t n_admissions = 1;
    if (rng.chance(params.readmission_rate)) n_admissions += 1 + rng.below(2);

    const std::int64_t first_admit =
        kBaseTime + static_cast<std::int64_t>(rng.below(200)) * kDay +
        static_cast<std::int64_t>(rng.below(24)) * kHour;

    // Outpatient labs precede the first admission.
    for (std::size_t t = 0; t < 3; ++t) {
      if (!rng.chance(params.outpatient_lab_rate)) continue;
      const LabItem& item = rng.pick(kLabItems);
      const std::int64_t when =
          first_admit - static_cast<std::int64_t>(5 + rng.below(60)) * kDay +
          static_cast<std::int64_t>(rng.below(12)) * kHour;
      const bool abnormal = rng.chance(params.abnormal_rate);
      bundle.labevents.rows.push_back(
          {subject, "", item.itemid, time_string(when),
           std::to_string(1 + rng.below(200)), item.uom,
           abnormal ? "abnormal" : ""});
    }

    std::int64_t cursor = first_admit;
    for (std::size_t a = 0; a < n_admissions; ++a) {
      const std::string hadm = std::to_string(hadm_counter++);
      const std::int64_t admit = cursor;
      const std::int64_t stay =
          2 * kDay + static_cast<std::int64_t>(rng.below(14)) * kDay +
          static_cast<std::int64_t>(rng.below(24)) * kHour;
      const std::int64_t disch = admit + stay;
      cursor = disch + static_cast<std::int64_t>(10 + rng.below(90)) * kDay;

      // Strictly increasing in-stay clock for logistic rows; stays are at
      // least 48h and at most ~14 events get placed, so it never reaches
      // the discharge time.
      std::int64_t in_stay = admit;
      auto next_time = [&rng, &in_stay] {
        in_stay += kHour + static_cast<std::int64_t>(rng.below(1800));
        return in_stay;
      };

      std::string edreg, edout;
      if (rng.chance(params.ed_rate)) {
        edreg = time_string(next_time());
        edout = time_string(next_time());
      }
      std::string death;
      if (a + 1 == n_admissions && rng.chance(params.death_rate)) {
        death = time_string(disch - kHour / 2);
      }
      bundle.admissions.rows.push_back({subject, hadm, time_string(admit),
                                        time_string(disch), death, edreg,
                                        edout});

      // Diagnoses: one guaranteed non-external code plus optional extras
      // that may hit the E/V exclusion.
      std::vector<std::string> codes;
      codes.push_back(rng.pick(kIcdCodes));
      if (rng.chance(params.multimorbid_rate)) {
        const std::size_t extra = 1 + rng.below(3);
        for (std::size_t i = 0; i < extra; ++i) {
          const std::string code = rng.chance(0.2)
                                       ? rng.pick(kExternalIcdCodes)
                                       : rng.pick(kIcdCodes);
          if (std::find(codes.begin(), codes.end(), code) == codes.end()) {
            codes.push_back(code);
          }
        }
      }
      for (std::size_t i = 0; i < codes.size(); ++i) {
        bundle.diagnoses_icd.rows.push_back(
            {subject, hadm, std::to_string(i + 1), codes[i]});
      }

      if (rng.chance(params.transfer_rate)) {
        const std::size_t n = 1 + rng.below(2);
        for (std::size_t i = 0; i < n; ++i) {
          const std::string prev = i == 0 ? "" : rng.pick(kServices);
          bundle.services.rows.push_back({subject, hadm,
                                          time_string(next_time()), prev,
                                          rng.pick(kServices)});
        }
      }
      if (rng.chance(params.transfer_rate)) {
        const std::size_t n = 1 + rng.below(3);
        for (std::size_t i = 0; i < n; ++i) {
          bundle.transfers.rows.push_back(
              {subject, hadm, time_string(next_time()), rng.pick(kWards)});
        }
      }
      if (rng.chance(params.transfer_rate * 0.6)) {
        const std::int64_t in = next_time();
        bundle.icustays.rows.push_back({subject, hadm, time_string(in),
                                        time_string(in + kDay),
                                        rng.pick(kCareUnits)});
      }
      if (rng.chance(params.callout_rate)) {
        bundle.callout.rows.push_back({subject, hadm,
                                       time_string(next_time())});
      }

      for (std::size_t t = 0; t < 6; ++t) {
        if (!rng.chance(params.lab_rate)) continue;
        const LabItem& item = rng.pick(kLabItems);
        const std::int64_t when =
            admit + kHour +
            static_cast<std::int64_t>(rng.below(
                static_cast<std::uint64_t>(stay - 2 * kHour)));
        const bool abnormal = rng.chance(params.abnormal_rate);
        bundle.labevents.rows.push_back(
            {subject, hadm, item.itemid, time_string(when),
             std::to_string(1 + rng.below(200)), item.uom,
             abnormal ? "abnormal" : ""});
      }

      for (std::size_t t = 0; t < 4; ++t) {
        if (!rng.chance(params.prescription_rate)) continue;
        const Drug& drug = rng.pick(kDrugs);
        const std::int64_t start =
            admit + kHour +
            static_cast<std::int64_t>(
                rng.below(static_cast<std::uint64_t>(stay - 2 * kHour)));
        const std::int64_t end =
            std::min(disch, start + static_cast<std::int64_t>(rng.below(5)) *
                                        kDay);
        bundle.prescriptions.rows.push_back(
            {subject, hadm, time_string(start), time_string(end), drug.name,
             drug.dose, drug.unit, drug.form});
      }
    }
  }

  bundle.validate();
  return bundle;
}

}  // namespace medfg
