#pragma once

#include <stdexcept>
#include <string>

namespace ettx {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define ETTX_ERROR(Name) \
    struct Name : Error { using Error::Error; }

ETTX_ERROR(MalformedRefWord);
ETTX_ERROR(SpanOutOfRange);
ETTX_ERROR(OverlappingSpans);
ETTX_ERROR(SyntaxError);
ETTX_ERROR(VariableNestingError);
ETTX_ERROR(AlphabetError);
ETTX_ERROR(AlphabetMismatch);
ETTX_ERROR(BudgetExceeded);
ETTX_ERROR(NotGarbageFree);
ETTX_ERROR(SizeBudgetExceeded);
ETTX_ERROR(SupplyExhausted);
ETTX_ERROR(PreconditionViolation);
ETTX_ERROR(ParseError);

#undef ETTX_ERROR

} // namespace ettx
