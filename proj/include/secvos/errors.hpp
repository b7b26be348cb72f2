#pragma once

#include <stdexcept>
#include <string>

namespace secvos {

// Base of every error this library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatchError : public Error { public: using Error::Error; };
class MalformedRleError : public Error { public: using Error::Error; };
class GeometryMismatchError : public Error { public: using Error::Error; };
class NotNormalizedError : public Error { public: using Error::Error; };
class EmptyFrameError : public Error { public: using Error::Error; };
class EmptySequenceError : public Error { public: using Error::Error; };
class FrozenBankError : public Error { public: using Error::Error; };
class OutOfOrderFrameError : public Error { public: using Error::Error; };
class LengthMismatchError : public Error { public: using Error::Error; };
class MissingSceneListError : public Error { public: using Error::Error; };
class MissingFpsError : public Error { public: using Error::Error; };
class MissingFileError : public Error { public: using Error::Error; };
class UnknownObjectIdError : public Error { public: using Error::Error; };
class OutOfBoundsTrajectoryError : public Error { public: using Error::Error; };
class ValidationError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };

// Backend/protocol failures carry an exit-code distinction in the CLI.
class BackendError : public Error { public: using Error::Error; };
class BackendUnavailableError : public BackendError { public: using BackendError::BackendError; };
class ProtocolViolationError : public BackendError { public: using BackendError::BackendError; };
class TimeoutError : public BackendError { public: using BackendError::BackendError; };

} // namespace secvos
