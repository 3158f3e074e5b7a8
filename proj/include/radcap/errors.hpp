#pragma once

#include <stdexcept>
#include <string>

namespace radcap {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Input-format failures (CLI exit code 2).
class MalformedManifest : public Error { public: using Error::Error; };
class DuplicateSequence : public Error { public: using Error::Error; };
class UnknownEnumValue  : public Error { public: using Error::Error; };
class UnknownSequence   : public Error { public: using Error::Error; };
class BadMagic          : public Error { public: using Error::Error; };
class DimMismatch       : public Error { public: using Error::Error; };
class TruncatedFile     : public Error { public: using Error::Error; };
class KeyMismatch       : public Error { public: using Error::Error; };
class NonFiniteInput    : public Error { public: using Error::Error; };
class EmptyEvaluation   : public Error { public: using Error::Error; };
class MalformedInput    : public Error { public: using Error::Error; };

// Configuration failures (CLI exit code 3).
class ConfigError       : public Error { public: using Error::Error; };
class NonPositiveRange  : public Error { public: using Error::Error; };

// Contract violations (CLI exit code 4).
class OutOfFov          : public Error { public: using Error::Error; };

}  // namespace radcap
