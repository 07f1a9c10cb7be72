#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace singtrack {

enum class ErrorKind {
    StepUnderflow,
    MaxStepsExceeded,
    NoConvergence,
    DerivativeVanished,
    PathNotClosed,
    InvalidPath,
    InternalInconsistency,
    TableTooSmall,
    SeriesNotAsymptotic,
    SingularityFloor,
    FitDiverged,
    BasinEscape,
    BranchAmbiguity,
    BranchPoint,
    SqrtCut,
    WrongSheet,
    MissingLowerOrder,
    AnchorSeriesNotAsymptotic,
    TurningPointCollision,
    ZeroOnContour,
    IllConditionedFit,
    OriginSingular,
    ConfigInvalid,
    StudyFailed,
    UnknownArtifact,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DerivativeVanished: return "DerivativeVanished";
    case ErrorKind::PathNotClosed: return "PathNotClosed";
    case ErrorKind::InvalidPath: return "InvalidPath";
    case ErrorKind::InternalInconsistency: return "InternalInconsistency";
    case ErrorKind::TableTooSmall: return "TableTooSmall";
    case ErrorKind::SeriesNotAsymptotic: return "SeriesNotAsymptotic";
    case ErrorKind::SingularityFloor: return "SingularityFloor";
    case ErrorKind::FitDiverged: return "FitDiverged";
    case ErrorKind::BasinEscape: return "BasinEscape";
    case ErrorKind::BranchAmbiguity: return "BranchAmbiguity";
    case ErrorKind::BranchPoint: return "BranchPoint";
    case ErrorKind::SqrtCut: return "SqrtCut";
    case ErrorKind::WrongSheet: return "WrongSheet";
    case ErrorKind::MissingLowerOrder: return "MissingLowerOrder";
    case ErrorKind::AnchorSeriesNotAsymptotic: return "AnchorSeriesNotAsymptotic";
    case ErrorKind::TurningPointCollision: return "TurningPointCollision";
    case ErrorKind::ZeroOnContour: return "ZeroOnContour";
    case ErrorKind::IllConditionedFit: return "IllConditionedFit";
    case ErrorKind::OriginSingular: return "OriginSingular";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::StudyFailed: return "StudyFailed";
    case ErrorKind::UnknownArtifact: return "UnknownArtifact";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Raised when the step size collapses; keeps the last accepted point.
class StepUnderflow : public Error {
public:
    StepUnderflow(const std::string& what, double s, std::complex<double> z,
                  std::vector<std::complex<double>> y)
        : Error(ErrorKind::StepUnderflow, what), s_last(s), z_last(z), y_last(std::move(y)) {}
    double s_last;
    std::complex<double> z_last;
    std::vector<std::complex<double>> y_last;
};

}  // namespace singtrack
