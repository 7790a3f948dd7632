#pragma once

#include <cstdint>

#include "medfg/mimic.hpp"

namespace medfg {

/// Rates are probabilities in [0,1]; anything else raises BadRate.
struct SynthParams {
  double multimorbid_rate = 0.6;     // extra ICD codes in an admission
  double readmission_rate = 0.5;     // additional admissions per patient
  double transfer_rate = 0.7;        // service/ward/ICU transfer rows
  double lab_rate = 0.8;             // inpatient lab rows
  double abnormal_rate = 0.35;       // abnormal flag on a lab row
  double prescription_rate = 0.7;    // prescription rows
  double outpatient_lab_rate = 0.2;  // lab rows with a null hadm_id
  double ed_rate = 0.4;              // ED registration/discharge pair
  double callout_rate = 0.5;         // callout request row
  double death_rate = 0.05;          // in-hospital death on last admission

  void validate() const;
};

/// Deterministic MIMIC-shaped bundle: same (seed, n_patients, params) means
/// an identical bundle, with no wall-clock or OS entropy involved. Foreign
/// keys always resolve; each admission's logistic timestamps are strictly
/// ordered with admission first and discharge last. The ICD vocabulary
/// includes E/V codes so the exclusion rule gets exercised.
RelationalBundle generate_bundle(std::uint64_t seed, std::size_t n_patients,
                                 const SynthParams& params);

}  // namespace medfg
