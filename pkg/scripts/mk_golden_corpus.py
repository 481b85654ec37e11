"""One-shot generator for tests/golden_corpus (committed fixture inputs).

Run from the repo root: python3 scripts/mk_golden_corpus.py
Regenerating overwrites the corpus in place; the replay store is built
separately by scripts/build_golden_replay.py.
"""

from __future__ import annotations

import json
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent / "tests" / "golden_corpus"


def _write_json(rel: str, payload) -> None:
    path = ROOT / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n", encoding="utf-8")


def _write_text(rel: str, text: str) -> None:
    path = ROOT / rel
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# CT.gov documents

SST_ELIGIBILITY = (
    "Inclusion criteria:\n"
    "- Age 50 years or older\n"
    "- Subfoveal choroidal neovascularization secondary to age-related macular degeneration\n"
    "- Best-corrected visual acuity between 20/100 and 20/800 in the study eye\n"
    "Exclusion criteria:\n"
    "- Prior submacular surgery in the study eye\n"
    "- Other ocular disease limiting vision"
)

NCT00000150 = {
    "nctId": "NCT00000150",
    "protocolSection": {
        "identificationModule": {
            "nctId": "NCT00000150",
            "briefTitle": "Submacular Surgery Trials",
            "officialTitle": "Surgical Removal vs Observation for Subfoveal Choroidal Neovascularization",
        },
        "descriptionModule": {
            "briefSummary": (
                "To determine whether surgical removal of subfoveal choroidal "
                "neovascularization stabilizes or improves vision compared with observation."
            )
        },
        "statusModule": {"overallStatus": "COMPLETED", "startDateStruct": {"date": "1997-10"}},
        "designModule": {
            "studyType": "INTERVENTIONAL",
            "phases": ["PHASE3"],
            "enrollmentInfo": {"count": 454, "type": "ACTUAL"},
            "designInfo": {
                "allocation": "RANDOMIZED",
                "interventionModel": "PARALLEL",
                "primaryPurpose": "TREATMENT",
                "maskingInfo": {"masking": "NONE"},
            },
        },
        "eligibilityModule": {
            "sex": "ALL",
            "minimumAge": "50 Years",
            "healthyVolunteers": False,
            "eligibilityCriteria": SST_ELIGIBILITY,
        },
        "sponsorCollaboratorsModule": {"leadSponsor": {"name": "National Eye Institute"}},
        "armsInterventionsModule": {
            "interventions": [
                {"type": "PROCEDURE", "name": "Subfoveal Choroidal Neovascularization Removal"}
            ]
        },
        "outcomesModule": {
            "primaryOutcomes": [
                {
                    "measure": "Change in best-corrected visual acuity from baseline",
                    "timeFrame": "24 months",
                }
            ]
        },
    },
}

MARINA_ELIGIBILITY = (
    "Inclusion criteria:\n"
    "- Age 50 years or older\n"
    "- Primary or recurrent minimally classic or occult subfoveal neovascular "
    "age-related macular degeneration\n"
    "- Best-corrected visual acuity 20/40 to 20/320 in the study eye\n"
    "Exclusion criteria:\n"
    "- Prior photodynamic therapy in the study eye\n"
    "- Uncontrolled glaucoma"
)

NCT00056836 = {
    "nctId": "NCT00056836",
    "protocolSection": {
        "identificationModule": {
            "nctId": "NCT00056836",
            "briefTitle": "Ranibizumab Injections for Minimally Classic or Occult Neovascular AMD",
            "officialTitle": (
                "A Randomized, Double-Masked, Sham-Controlled Study of Ranibizumab in Subjects "
                "With Minimally Classic or Occult Subfoveal Neovascular Age-Related Macular Degeneration"
            ),
        },
        "descriptionModule": {
            "briefSummary": (
                "Monthly intravitreal ranibizumab compared with sham injections in subjects "
                "with minimally classic or occult subfoveal neovascular AMD."
            )
        },
        "statusModule": {"overallStatus": "COMPLETED", "startDateStruct": {"date": "2003-03"}},
        "designModule": {
            "studyType": "INTERVENTIONAL",
            "phases": ["PHASE3"],
            "enrollmentInfo": {"count": 716, "type": "ACTUAL"},
            "designInfo": {
                "allocation": "RANDOMIZED",
                "interventionModel": "PARALLEL",
                "primaryPurpose": "TREATMENT",
                "maskingInfo": {"masking": "DOUBLE"},
            },
        },
        "eligibilityModule": {
            "sex": "ALL",
            "minimumAge": "50 Years",
            "healthyVolunteers": False,
            "eligibilityCriteria": MARINA_ELIGIBILITY,
        },
        "sponsorCollaboratorsModule": {"leadSponsor": {"name": "Genentech, Inc."}},
        "armsInterventionsModule": {
            "armGroups": [
                {"label": "0.3 mg ranibizumab", "type": "EXPERIMENTAL", "description": "Monthly intravitreal injection, 0.3 mg"},
                {"label": "0.5 mg ranibizumab", "type": "EXPERIMENTAL", "description": "Monthly intravitreal injection, 0.5 mg"},
                {"label": "Sham", "type": "SHAM_COMPARATOR", "description": "Monthly sham injection procedure"},
            ],
            "interventions": [
                {
                    "type": "DRUG",
                    "name": "Ranibizumab",
                    "armGroupLabels": ["0.3 mg ranibizumab", "0.5 mg ranibizumab"],
                },
                {"type": "OTHER", "name": "Sham injection", "armGroupLabels": ["Sham"]},
            ],
        },
        "outcomesModule": {
            "primaryOutcomes": [
                {
                    "measure": "Proportion of subjects losing fewer than 15 letters of visual acuity",
                    "timeFrame": "12 months",
                }
            ]
        },
    },
}

NCT00061594 = {
    "nctId": "NCT00061594",
    "protocolSection": {
        "identificationModule": {
            "nctId": "NCT00061594",
            "briefTitle": "Ranibizumab vs Verteporfin Photodynamic Therapy in Predominantly Classic Neovascular AMD",
            "officialTitle": (
                "A Randomized, Double-Masked, Active-Controlled Study of Ranibizumab Compared "
                "With Verteporfin Photodynamic Therapy in Predominantly Classic Subfoveal "
                "Neovascular Age-Related Macular Degeneration"
            ),
        },
        "descriptionModule": {
            "briefSummary": (
                "Monthly intravitreal ranibizumab compared with verteporfin photodynamic "
                "therapy in predominantly classic subfoveal neovascular AMD."
            )
        },
        "statusModule": {"overallStatus": "COMPLETED", "startDateStruct": {"date": "2003-06"}},
        "designModule": {
            "studyType": "INTERVENTIONAL",
            "phases": ["PHASE3"],
            "enrollmentInfo": {"count": 423, "type": "ACTUAL"},
            "designInfo": {
                "allocation": "RANDOMIZED",
                "interventionModel": "PARALLEL",
                "primaryPurpose": "TREATMENT",
                "maskingInfo": {"masking": "DOUBLE"},
            },
        },
        "eligibilityModule": {
            "sex": "ALL",
            "minimumAge": "50 Years",
            "healthyVolunteers": False,
            "eligibilityCriteria": (
                "Inclusion criteria:\n"
                "- Age 50 years or older\n"
                "- Predominantly classic subfoveal choroidal neovascularization secondary to AMD\n"
                "Exclusion criteria:\n"
                "- Prior subfoveal laser photocoagulation"
            ),
        },
        "sponsorCollaboratorsModule": {"leadSponsor": {"name": "Genentech, Inc."}},
        "armsInterventionsModule": {
            "armGroups": [
                {"label": "Ranibizumab 0.3 mg", "type": "EXPERIMENTAL"},
                {"label": "Ranibizumab 0.5 mg", "type": "EXPERIMENTAL"},
                {"label": "Verteporfin PDT", "type": "ACTIVE_COMPARATOR"},
            ],
            "interventions": [
                {
                    "type": "DRUG",
                    "name": "Ranibizumab",
                    "armGroupLabels": ["Ranibizumab 0.3 mg", "Ranibizumab 0.5 mg"],
                },
                {"type": "DRUG", "name": "Verteporfin", "armGroupLabels": ["Verteporfin PDT"]},
            ],
        },
        "outcomesModule": {
            "primaryOutcomes": [
                {
                    "measure": "Proportion of subjects losing fewer than 15 letters in best-corrected visual acuity",
                    "timeFrame": "12 months",
                }
            ]
        },
    },
}

NCT00593450 = {
    "nctId": "NCT00593450",
    "protocolSection": {
        "identificationModule": {
            "nctId": "NCT00593450",
            "briefTitle": "Comparison of Ranibizumab and Bevacizumab for Neovascular AMD",
            "officialTitle": (
                "A Multicenter Randomized Clinical Trial Comparing Ranibizumab and "
                "Bevacizumab for Treatment of Neovascular Age-Related Macular Degeneration"
            ),
        },
        "descriptionModule": {
            "briefSummary": (
                "Head-to-head comparison of intravitreal bevacizumab and ranibizumab, "
                "on monthly and as-needed schedules, for neovascular AMD."
            )
        },
        "statusModule": {"overallStatus": "COMPLETED", "startDateStruct": {"date": "2008-02"}},
        "designModule": {
            "studyType": "INTERVENTIONAL",
            "phases": ["PHASE3"],
            "enrollmentInfo": {"count": 1185, "type": "ACTUAL"},
            "designInfo": {
                "allocation": "RANDOMIZED",
                "interventionModel": "PARALLEL",
                "primaryPurpose": "TREATMENT",
                "maskingInfo": {"masking": "SINGLE"},
            },
        },
        "eligibilityModule": {
            "sex": "ALL",
            "minimumAge": "50 Years",
            "healthyVolunteers": False,
            "eligibilityCriteria": (
                "Inclusion criteria:\n"
                "- Age 50 years or older\n"
                "- Untreated active subfoveal choroidal neovascularization due to AMD\n"
                "- Visual acuity 20/25 to 20/320 in the study eye\n"
                "Exclusion criteria:\n"
                "- Previous treatment for neovascular AMD in the study eye"
            ),
        },
        "sponsorCollaboratorsModule": {"leadSponsor": {"name": "University of Pennsylvania"}},
        "armsInterventionsModule": {
            "armGroups": [
                {"label": "Ranibizumab monthly", "type": "ACTIVE_COMPARATOR"},
                {"label": "Bevacizumab monthly", "type": "EXPERIMENTAL"},
                {"label": "Ranibizumab as needed", "type": "ACTIVE_COMPARATOR"},
                {"label": "Bevacizumab as needed", "type": "EXPERIMENTAL"},
            ],
            "interventions": [
                {
                    "type": "DRUG",
                    "name": "Ranibizumab",
                    "armGroupLabels": ["Ranibizumab monthly", "Ranibizumab as needed"],
                },
                {
                    "type": "DRUG",
                    "name": "Bevacizumab",
                    "armGroupLabels": ["Bevacizumab monthly", "Bevacizumab as needed"],
                },
            ],
        },
        "outcomesModule": {
            "primaryOutcomes": [
                {"measure": "Mean change in visual acuity from baseline", "timeFrame": "1 year"}
            ]
        },
    },
}

NCT06330298 = {
    "nctId": "NCT06330298",
    "protocolSection": {
        "identificationModule": {
            "nctId": "NCT06330298",
            "briefTitle": "Pembrolizumab With Chemoradiation in Locally Advanced Cervical Cancer",
            "officialTitle": (
                "A Single-Arm Study of Pembrolizumab Added to Definitive Chemoradiation "
                "in Locally Advanced Cervical Cancer"
            ),
        },
        "descriptionModule": {
            "briefSummary": (
                "Single-arm evaluation of pembrolizumab added to definitive chemoradiation "
                "in locally advanced cervical cancer."
            )
        },
        "statusModule": {"overallStatus": "RECRUITING", "startDateStruct": {"date": "2024-05"}},
        "designModule": {
            "studyType": "INTERVENTIONAL",
            "phases": ["PHASE2"],
            "enrollmentInfo": {"count": 84, "type": "ESTIMATED"},
            "designInfo": {
                "allocation": "NA",
                "interventionModel": "SINGLE_GROUP",
                "primaryPurpose": "TREATMENT",
                "maskingInfo": {"masking": "NONE"},
            },
        },
        "eligibilityModule": {
            "sex": "FEMALE",
            "minimumAge": "18 Years",
            "healthyVolunteers": False,
            "eligibilityCriteria": (
                "Inclusion criteria:\n"
                "- Histologically confirmed locally advanced cervical cancer\n"
                "- No prior systemic therapy for this diagnosis\n"
                "Exclusion criteria:\n"
                "- Distant metastatic disease"
            ),
        },
        "sponsorCollaboratorsModule": {"leadSponsor": {"name": "Example Cancer Center"}},
        "armsInterventionsModule": {
            "armGroups": [
                {"label": "Pembrolizumab + chemoradiation", "type": "EXPERIMENTAL"}
            ],
            "interventions": [
                {
                    "type": "DRUG",
                    "name": "Pembrolizumab",
                    "armGroupLabels": ["Pembrolizumab + chemoradiation"],
                }
            ],
        },
        "outcomesModule": {
            "primaryOutcomes": [
                {
                    "measure": "Objective response rate by PD-L1 expression subgroup",
                    "timeFrame": "12 months",
                }
            ]
        },
    },
}

NCT02823470 = {
    "nctId": "NCT02823470",
    "protocolSection": {
        "identificationModule": {
            "nctId": "NCT02823470",
            "briefTitle": "Misoprostol Dosing Intervals for Medical Management of Miscarriage",
            "officialTitle": (
                "A Randomized Trial of Short Versus Standard Misoprostol Dosing Intervals "
                "for Medical Management of First-Trimester Miscarriage"
            ),
        },
        "descriptionModule": {
            "briefSummary": (
                "Comparison of a short misoprostol re-dosing interval with the standard "
                "interval for medical management of first-trimester miscarriage."
            )
        },
        "statusModule": {
            "overallStatus": "TERMINATED",
            "startDateStruct": {"date": "2016-09"},
            "whyStopped": "Study terminated early due to slow recruitment of patients",
        },
        "designModule": {
            "studyType": "INTERVENTIONAL",
            "phases": ["PHASE4"],
            "enrollmentInfo": {"count": 46, "type": "ACTUAL"},
            "designInfo": {
                "allocation": "RANDOMIZED",
                "interventionModel": "PARALLEL",
                "primaryPurpose": "TREATMENT",
                "maskingInfo": {"masking": "NONE"},
            },
        },
        "eligibilityModule": {
            "sex": "FEMALE",
            "minimumAge": "18 Years",
            "healthyVolunteers": False,
            "eligibilityCriteria": (
                "Inclusion criteria:\n"
                "- Confirmed first-trimester pregnancy loss\n"
                "- Choosing medical management\n"
                "Exclusion criteria:\n"
                "- Hemodynamic instability\n"
                "- Known allergy to prostaglandins"
            ),
        },
        "sponsorCollaboratorsModule": {"leadSponsor": {"name": "Example University Hospital"}},
        "armsInterventionsModule": {
            "armGroups": [
                {"label": "Short interval", "type": "EXPERIMENTAL", "description": "Misoprostol repeated after 4 hours"},
                {"label": "Standard interval", "type": "ACTIVE_COMPARATOR", "description": "Misoprostol repeated after 24 hours"},
            ],
            "interventions": [
                {
                    "type": "DRUG",
                    "name": "Misoprostol",
                    "armGroupLabels": ["Short interval", "Standard interval"],
                }
            ],
        },
        "outcomesModule": {
            "primaryOutcomes": [
                {"measure": "Complete expulsion without surgical intervention", "timeFrame": "7 days"}
            ]
        },
    },
}

AFLIBERCEPT_TITLE = "Intravitreal Aflibercept for Persistent Diabetic Macular Edema"

NCT01000001 = {
    "nctId": "NCT01000001",
    "protocolSection": {
        "identificationModule": {
            "nctId": "NCT01000001",
            "briefTitle": AFLIBERCEPT_TITLE,
            "officialTitle": (
                "A Phase 2 Randomized Study of Intravitreal Aflibercept Versus Macular "
                "Laser for Persistent Diabetic Macular Edema"
            ),
        },
        "descriptionModule": {
            "briefSummary": (
                "Intravitreal aflibercept compared with macular laser photocoagulation "
                "in eyes with persistent diabetic macular edema."
            )
        },
        "statusModule": {"overallStatus": "COMPLETED", "startDateStruct": {"date": "2010-01"}},
        "designModule": {
            "studyType": "INTERVENTIONAL",
            "phases": ["PHASE2"],
            "enrollmentInfo": {"count": 120, "type": "ACTUAL"},
            "designInfo": {
                "allocation": "RANDOMIZED",
                "interventionModel": "PARALLEL",
                "primaryPurpose": "TREATMENT",
                "maskingInfo": {"masking": "SINGLE"},
            },
        },
        "eligibilityModule": {
            "sex": "ALL",
            "minimumAge": "18 Years",
            "healthyVolunteers": False,
            "eligibilityCriteria": (
                "Inclusion criteria:\n"
                "- Center-involved diabetic macular edema despite prior macular laser\n"
                "- Visual acuity 20/32 to 20/320 in the study eye\n"
                "Exclusion criteria:\n"
                "- Intravitreal anti-VEGF therapy within 60 days"
            ),
        },
        "sponsorCollaboratorsModule": {"leadSponsor": {"name": "Example Eye Institute"}},
        "armsInterventionsModule": {
            "armGroups": [
                {"label": "Aflibercept", "type": "EXPERIMENTAL", "description": "Intravitreal aflibercept 2 mg every 4 weeks"},
                {"label": "Macular laser", "type": "ACTIVE_COMPARATOR", "description": "Focal/grid macular laser photocoagulation"},
            ],
            "interventions": [
                {"type": "DRUG", "name": "Aflibercept", "armGroupLabels": ["Aflibercept"]},
                {"type": "PROCEDURE", "name": "Macular laser photocoagulation", "armGroupLabels": ["Macular laser"]},
            ],
        },
        "outcomesModule": {
            "primaryOutcomes": [
                {"measure": "Mean change in visual acuity", "timeFrame": "12 months"}
            ]
        },
    },
    "resultsSection": {
        "baselineCharacteristicsModule": {
            "populationDescription": "Intention-to-treat population",
            "totalCount": 120,
        },
        "outcomeMeasuresModule": {
            "outcomeMeasures": [
                {
                    "type": "PRIMARY",
                    "title": "Mean change in visual acuity",
                    "reportingStatus": "POSTED",
                    "unitOfMeasure": "letters",
                    "groups": [
                        {"id": "OG000", "title": "Aflibercept"},
                        {"id": "OG001", "title": "Macular laser", "isControl": True},
                    ],
                    "measurements": [
                        {"groupId": "OG000", "value": "9.1"},
                        {"groupId": "OG001", "value": "1.3"},
                    ],
                    "analyses": [{"pValue": "0.004"}],
                },
                {
                    "type": "SECONDARY",
                    "title": "Central subfield thickness change",
                    "reportingStatus": "NOT_POSTED",
                },
            ]
        },
        "adverseEventsModule": {
            "eventGroups": [
                {"id": "EG000", "title": "Aflibercept", "seriousNumAffected": 2, "otherNumAffected": 14},
                {"id": "EG001", "title": "Macular laser", "seriousNumAffected": 1, "otherNumAffected": 9},
            ],
            "seriousEvents": [
                {
                    "term": "Endophthalmitis",
                    "organSystem": "Eye disorders",
                    "stats": [
                        {"groupId": "EG000", "numAffected": 2, "numAtRisk": 61},
                        {"groupId": "EG001", "numAffected": 0, "numAtRisk": 59},
                    ],
                }
            ],
            "otherEvents": [
                {
                    "term": "Conjunctival haemorrhage",
                    "organSystem": "Eye disorders",
                    "stats": [
                        {"groupId": "EG000", "numAffected": 14, "numAtRisk": 61},
                        {"groupId": "EG001", "numAffected": 9, "numAtRisk": 59},
                    ],
                }
            ],
        },
    },
}


# ---------------------------------------------------------------------------
# registry rows (ANZCTR)

ANZCTR_ROWS = [
    {
        "Registration number": "ACTRN12620000000001",
        "Public title": AFLIBERCEPT_TITLE,
        "Brief summary": (
            "Aflibercept injections compared with macular laser in eyes with "
            "persistent diabetic macular edema."
        ),
        "Primary sponsor": "Example Eye Institute",
        "Date registered": "2020-01-15",
        "Phase": "Phase 2",
        "Gender": "Both males and females",
        "Minimum age": "18 Years",
        "Maximum age": "No limit",
        "Healthy volunteers": "No",
        "Recruitment status": "Completed",
        "Study type": "Interventional",
        "Target sample size": "120",
        "Actual sample size": "120",
        "Results – plain English summary": "",
        "Citation/DOI/link/details": "",
        "Primary outcome": "",
        "Secondary outcome": "",
    },
    {
        "Registration number": "ACTRN12620000000002",
        "Public title": "Metformin and Lifestyle Coaching for Prevention of Type 2 Diabetes",
        "Brief summary": (
            "Metformin combined with structured lifestyle coaching for adults with "
            "prediabetes at high risk of progression to type 2 diabetes."
        ),
        "Primary sponsor": "Example Health Service",
        "Date registered": "2020-06-02",
        "Phase": "Phase 3",
        "Gender": "Both males and females",
        "Minimum age": "25 Years",
        "Maximum age": "70 Years",
        "Healthy volunteers": "No",
        "Recruitment status": "Completed",
        "Study type": "Interventional",
        "Target sample size": "300",
        "Actual sample size": "287",
        "Results – plain English summary": "",
        "Citation/DOI/link/details": "",
        "Primary outcome": "Proportion of participants progressing to type 2 diabetes at 24 months",
        "Secondary outcome": "",
    },
]


# ---------------------------------------------------------------------------
# PubMed articles

LAMOTRIGINE_INCLUDES = {
    "20696552": "Lamotrigine add-on therapy for drug-resistant focal epilepsy: a randomized placebo-controlled trial",
    "2612495": "Double-blind placebo-controlled crossover study of lamotrigine in treatment-resistant partial seizures",
    "8937535": "Lamotrigine as add-on therapy in patients with refractory partial seizures: a multicentre trial",
    "10563619": "Placebo-controlled study of lamotrigine adjunctive therapy in partial epilepsy",
    "2498073": "Lamotrigine in refractory epilepsy: a placebo-controlled crossover trial",
    "2127016": "Adjunctive lamotrigine for drug-resistant partial seizures: dose-ranging study",
    "8232944": "A double-blind trial of lamotrigine added to carbamazepine in refractory partial epilepsy",
    "8112232": "Lamotrigine versus placebo as adjunctive treatment in partial-onset seizures",
    "17938371": "Adjunctive lamotrigine in adults with uncontrolled partial seizures: randomized trial",
    "18077797": "Lamotrigine extended-release adjunctive therapy for partial seizures",
    "8505632": "Multicentre placebo-controlled evaluation of lamotrigine in therapy-resistant epilepsy",
    "8453943": "Efficacy of adjunctive lamotrigine in drug-resistant partial epilepsy: crossover study",
}

MARINA_ABSTRACT = (
    "BACKGROUND: Ranibizumab is a humanized antibody fragment against vascular "
    "endothelial growth factor A. METHODS: In this randomized trial, 716 patients "
    "with minimally classic or occult subfoveal neovascular age-related macular "
    "degeneration received monthly intravitreal ranibizumab (0.3 mg or 0.5 mg) or "
    "sham injections for two years (ClinicalTrials.gov number NCT00056836). "
    "RESULTS: At 12 months, 94.5 percent of the 0.3 mg group and 94.6 percent of "
    "the 0.5 mg group lost fewer than 15 letters of visual acuity, compared with "
    "62.2 percent of the sham group. CONCLUSIONS: Ranibizumab prevented vision "
    "loss and improved mean visual acuity in minimally classic or occult "
    "neovascular age-related macular degeneration."
)

AFLIBERCEPT_ABSTRACT = (
    "PURPOSE: To compare intravitreal aflibercept with macular laser in "
    "persistent diabetic macular edema. METHODS: 120 eyes were randomized to "
    "aflibercept 2 mg every 4 weeks or focal/grid macular laser (registered as "
    "NCT01000001). RESULTS: Mean visual acuity improved by 9.1 letters with "
    "aflibercept versus 1.3 letters with laser. Ocular adverse events were "
    "infrequent in both groups. CONCLUSIONS: Aflibercept produced greater "
    "visual-acuity gains than laser over 12 months."
)

PUBMED_ARTICLES = (
    [
        {"pmid": pmid, "title": title, "year": 1990 + (int(pmid) % 30)}
        for pmid, title in sorted(LAMOTRIGINE_INCLUDES.items())
    ]
    + [
        {
            "pmid": "31000001",
            "title": "Gabapentin monotherapy for newly diagnosed focal epilepsy: open-label study",
            "year": 2018,
        },
        {
            "pmid": "31000002",
            "title": "Retrospective chart review of lamotrigine tolerability in elderly patients",
            "year": 2019,
        },
        {
            "pmid": "16000001",
            "title": "Photodynamic therapy case series in polypoidal choroidal vasculopathy",
            "year": 2005,
        },
        {
            "pmid": "17021318",
            "title": "Ranibizumab for minimally classic or occult neovascular age-related macular degeneration",
            "abstract": MARINA_ABSTRACT,
            "year": 2006,
            "accession_numbers": ["NCT00056836"],
        },
        {
            "pmid": "27000001",
            "title": AFLIBERCEPT_TITLE,
            "abstract": AFLIBERCEPT_ABSTRACT,
            "year": 2016,
            "accession_numbers": ["NCT01000001"],
        },
        {
            "pmid": "32000001",
            "title": "Bed rest versus early ambulation after diagnostic lumbar puncture: randomized trial",
            "year": 2001,
        },
        {
            "pmid": "32000002",
            "title": "Early mobilisation after spinal anaesthesia: effects on post-dural-puncture headache",
            "year": 2002,
        },
        {
            "pmid": "32000003",
            "title": "Supine positioning after myelography and incidence of headache",
            "year": 1999,
        },
    ]
)


# ---------------------------------------------------------------------------
# reviews

MACULAR_REVIEW_XML = """<?xml version="1.0" encoding="UTF-8"?>
<article>
  <back>
    <ref-list>
      <title>References to studies included in this review</title>
      <ref id="r1">
        <mixed-citation>Submacular Surgery Trials Research Group. Surgical removal vs observation for subfoveal choroidal neovascularization. Registered as NCT00000150.</mixed-citation>
      </ref>
      <ref id="r2">
        <mixed-citation>Rosenfeld PJ et al. Ranibizumab for neovascular age-related macular degeneration. N Engl J Med 2006. Trial registration NCT00056836.</mixed-citation>
        <pub-id pub-id-type="pmid">17021318</pub-id>
      </ref>
      <ref id="r3">
        <mixed-citation>Ranibizumab versus verteporfin for neovascular age-related macular degeneration. Trial registration NCT00061594.</mixed-citation>
      </ref>
      <ref id="r4">
        <mixed-citation>Comparison of age-related macular degeneration treatments trial. Trial registration NCT00593450.</mixed-citation>
      </ref>
    </ref-list>
    <ref-list>
      <title>References to studies excluded from this review</title>
      <ref id="r5">
        <mixed-citation>Photodynamic therapy case series in polypoidal choroidal vasculopathy.</mixed-citation>
        <pub-id pub-id-type="pmid">16000001</pub-id>
      </ref>
    </ref-list>
  </back>
</article>
"""

LAMOTRIGINE_REF_TEMPLATE = """      <ref id="r{idx}">
        <mixed-citation>{title}.</mixed-citation>
        <pub-id pub-id-type="pmid">{pmid}</pub-id>
      </ref>
"""


def lamotrigine_review_xml() -> str:
    included = "".join(
        LAMOTRIGINE_REF_TEMPLATE.format(idx=i + 1, pmid=pmid, title=title)
        for i, (pmid, title) in enumerate(sorted(LAMOTRIGINE_INCLUDES.items()))
    )
    return f"""<?xml version="1.0" encoding="UTF-8"?>
<article>
  <back>
    <ref-list>
      <title>References to studies included in this review</title>
{included}    </ref-list>
    <ref-list>
      <title>References to studies excluded from this review</title>
      <ref id="x1">
        <mixed-citation>Gabapentin monotherapy for newly diagnosed focal epilepsy.</mixed-citation>
        <pub-id pub-id-type="pmid">31000001</pub-id>
      </ref>
      <ref id="x2">
        <mixed-citation>Retrospective chart review of lamotrigine tolerability.</mixed-citation>
        <pub-id pub-id-type="pmid">31000002</pub-id>
      </ref>
    </ref-list>
  </back>
</article>
"""


BEDREST_REVIEW_XML = """<?xml version="1.0" encoding="UTF-8"?>
<article>
  <back>
    <ref-list>
      <title>References to studies included in this review</title>
      <ref id="b1">
        <mixed-citation>Bed rest versus early ambulation after diagnostic lumbar puncture.</mixed-citation>
        <pub-id pub-id-type="pmid">32000001</pub-id>
      </ref>
      <ref id="b2">
        <mixed-citation>Early mobilisation after spinal anaesthesia.</mixed-citation>
        <pub-id pub-id-type="pmid">32000002</pub-id>
      </ref>
      <ref id="b3">
        <mixed-citation>Supine positioning after myelography and incidence of headache.</mixed-citation>
        <pub-id pub-id-type="pmid">32000003</pub-id>
      </ref>
    </ref-list>
  </back>
</article>
"""

REVIEW_INDEX = [
    {
        "pmid": "30000001",
        "background": (
            "Neovascular age-related macular degeneration is a leading cause of "
            "irreversible vision loss in older adults. Submacular surgery and "
            "anti-angiogenic drugs have both been proposed as treatments."
        ),
        "objectives": (
            "To assess the effects of surgical and pharmacological interventions "
            "for subfoveal choroidal neovascularization secondary to age-related "
            "macular degeneration."
        ),
        "criteria": (
            "Randomized controlled trials enrolling adults with subfoveal choroidal "
            "neovascularization secondary to age-related macular degeneration, "
            "comparing surgical removal, anti-VEGF therapy, or photodynamic therapy "
            "against observation, sham, or each other."
        ),
        "review_text": "",
    },
    {
        "pmid": "38078494",
        "background": (
            "About a third of people with epilepsy continue to have seizures despite "
            "treatment. Lamotrigine is one of several add-on options for "
            "drug-resistant focal epilepsy."
        ),
        "objectives": (
            "To evaluate the efficacy and tolerability of add-on lamotrigine for "
            "drug-resistant focal epilepsy."
        ),
        "criteria": (
            "Randomized placebo-controlled trials of add-on lamotrigine in people "
            "with drug-resistant focal epilepsy, reporting seizure frequency or "
            "treatment withdrawal. Non-randomized studies, monotherapy trials, and "
            "retrospective reviews are not eligible."
        ),
        "review_text": "",
    },
    {
        "pmid": "10796093",
        "background": (
            "Bed rest after a diagnostic or therapeutic procedure has long been "
            "prescribed to prevent complications such as post-dural-puncture headache."
        ),
        "objectives": (
            "To assess whether bed rest after a procedure prevents complications "
            "better than early ambulation."
        ),
        "criteria": "",
        "review_text": (
            "Across the included trials, outcomes for patients kept on bed rest "
            "after lumbar puncture, spinal anaesthesia, or myelography were no "
            "better than outcomes for patients who ambulated early. The incidence "
            "of headache did not differ between groups, and in some trials bed "
            "rest was associated with more adverse events. There is no evidence "
            "that bed rest after these procedures prevents complications."
        ),
    },
]


# ---------------------------------------------------------------------------
# protocol pairs

PROTOCOL_PAIRS = [
    {
        "nct_id": "NCT06330298",
        "title": (
            "A Single-Arm Study of Pembrolizumab Added to Definitive Chemoradiation "
            "in Locally Advanced Cervical Cancer"
        ),
        "section_text": (
            "Assuming a 12-month objective response rate of 60% under the null "
            "hypothesis and 75% under the alternative, a one-sided alpha of 0.05 "
            "and 80% power require 76 evaluable patients. Allowing for 10% "
            "attrition, a total of 84 patients will be enrolled."
        ),
        "registry_enrollment": 84,
        "assumptions_summary": (
            "Single-arm design powered at 80% with one-sided alpha 0.05 to detect "
            "an improvement in 12-month objective response rate from 60% to 75%, "
            "inflated for 10% attrition."
        ),
    },
    {
        "nct_id": "NCT00056836",
        "title": (
            "A Randomized, Double-Masked, Sham-Controlled Study of Ranibizumab in "
            "Subjects With Minimally Classic or Occult Subfoveal Neovascular "
            "Age-Related Macular Degeneration"
        ),
        "section_text": (
            "With 2:1 randomization across two ranibizumab dose groups and sham, "
            "90% power, and a two-sided alpha of 0.05 to detect a 20 percentage "
            "point difference in the proportion losing fewer than 15 letters, "
            "approximately 716 subjects are planned."
        ),
        "registry_enrollment": 716,
    },
    {
        "nct_id": "NCT00593450",
        "title": (
            "A Multicenter Randomized Clinical Trial Comparing Ranibizumab and "
            "Bevacizumab for Treatment of Neovascular Age-Related Macular Degeneration"
        ),
        "section_text": (
            "A non-inferiority margin of five letters, 90% power, and two-sided "
            "alpha of 0.05 require 1200 enrolled patients across the four arms."
        ),
        "registry_enrollment": 1185,
    },
]


def main() -> None:
    for doc in (
        NCT00000150,
        NCT00056836,
        NCT00061594,
        NCT00593450,
        NCT06330298,
        NCT02823470,
        NCT01000001,
    ):
        _write_json(f"ctgov/{doc['nctId']}.json", doc)
    _write_json("registry/ANZCTR.json", ANZCTR_ROWS)
    _write_json("pubmed/articles.json", PUBMED_ARTICLES)
    _write_json("reviews/index.json", REVIEW_INDEX)
    _write_text("reviews/30000001.xml", MACULAR_REVIEW_XML)
    _write_text("reviews/38078494.xml", lamotrigine_review_xml())
    _write_text("reviews/10796093.xml", BEDREST_REVIEW_XML)
    _write_json("protocols/pairs.json", PROTOCOL_PAIRS)
    print(f"golden corpus written under {ROOT}")


if __name__ == "__main__":
    main()
