#pragma once

namespace prodlex::reference {

/// Previously published evaluation results on the original (non-distributed)
/// datasets. Printed as comparison footers in reports; not reproducible from
/// the shipped synthetic corpora.
struct ScoreRow {
    const char* name;
    double precision;
    double recall;
    double accuracy;
    double f1;
};

inline constexpr ScoreRow kDescNaiveBayes{"naive bayes", 0.93, 0.72, 0.83, 0.81};
inline constexpr ScoreRow kDescSvm{"svm", 0.74, 0.62, 0.70, 0.67};
inline constexpr ScoreRow kDescParagraphVector{"paragraph vector", 0.85, 0.94, 0.88, 0.89};
inline constexpr ScoreRow kDescRnn{"recurrent network", 0.85, 0.89, 0.87, 0.87};

inline constexpr ScoreRow kCharNameLstm{"character LSTM", 0.84, 0.86, 0.85, 0.85};
inline constexpr ScoreRow kCharNameNativeSpeaker{"native-speaker baseline", 0.85, 0.87, 0.84,
                                                 0.85};

inline constexpr ScoreRow kTaggerOfficeProducts{"office products", 0.34, 0.83, 0.92, 0.48};
inline constexpr ScoreRow kTaggerCdsAndVinyl{"cds and vinyl", 0.09, 0.49, 0.91, 0.15};

}  // namespace prodlex::reference
