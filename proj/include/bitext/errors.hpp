#ifndef BITEXT_ERRORS_HPP
#define BITEXT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bitext {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define BITEXT_ERROR(Name, default_msg)                                  \
    class Name : public Error {                                          \
    public:                                                              \
        Name() : Error(default_msg) {}                                   \
        explicit Name(const std::string& msg) : Error(msg) {}            \
    }

// textnorm / subword
BITEXT_ERROR(EmptyCorpus, "empty corpus");
BITEXT_ERROR(DanglingMarker, "final subword unit carries the continuation marker");

// metrics
BITEXT_ERROR(EmptyReference, "empty reference");
BITEXT_ERROR(LengthMismatch, "score lists have different lengths");

// translator
BITEXT_ERROR(BackendUnavailable, "translation backend unavailable");
BITEXT_ERROR(MalformedBackendOutput, "translation backend produced malformed output");
BITEXT_ERROR(PivotMismatch, "pivot languages of the two translators disagree");

// docalign / hieralign
BITEXT_ERROR(EmptyCollection, "empty document collection");
BITEXT_ERROR(EmptyDocument, "document has no paragraphs");
BITEXT_ERROR(EmptyParagraph, "paragraph has no sentences");

// ingest
BITEXT_ERROR(FetchFailed, "fetch failed after retries");
BITEXT_ERROR(HostNotAllowed, "host is not in the allow-list");
BITEXT_ERROR(ExtractionFailed, "no content paragraphs matched");
BITEXT_ERROR(BadDate, "date present but unparseable");

// corpusio / cli
BITEXT_ERROR(SampleTooLarge, "sample size exceeds corpus size");
BITEXT_ERROR(MalformedFile, "malformed file");
BITEXT_ERROR(MissingInput, "required stage input is missing");
BITEXT_ERROR(ConfigInvalid, "invalid configuration");

#undef BITEXT_ERROR

}  // namespace bitext

#endif  // BITEXT_ERRORS_HPP
