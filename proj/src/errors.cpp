#include "sbstlab/errors.hpp"

namespace sbstlab {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::EmptyProgram: return "EmptyProgram";
        case ErrorCode::UnknownCallee: return "UnknownCallee";
        case ErrorCode::ArityMismatch: return "ArityMismatch";
        case ErrorCode::TypeMismatch: return "TypeMismatch";
        case ErrorCode::NoCompatibleSite: return "NoCompatibleSite";
        case ErrorCode::InsufficientFunctions: return "InsufficientFunctions";
        case ErrorCode::GenerationExhausted: return "GenerationExhausted";
        case ErrorCode::InsufficientNegatives: return "InsufficientNegatives";
        case ErrorCode::DegenerateTruth: return "DegenerateTruth";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::CyclicGraph: return "CyclicGraph";
        case ErrorCode::UnsupportedOperator: return "UnsupportedOperator";
        case ErrorCode::InvalidTest: return "InvalidTest";
        case ErrorCode::UnbalancedDesign: return "UnbalancedDesign";
        case ErrorCode::DegenerateCell: return "DegenerateCell";
        case ErrorCode::ZeroVarianceGroup: return "ZeroVarianceGroup";
        case ErrorCode::DegenerateSample: return "DegenerateSample";
        case ErrorCode::CorpusInvalid: return "CorpusInvalid";
        case ErrorCode::IncompleteDataset: return "IncompleteDataset";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Error";
}

} // namespace sbstlab
