#pragma once

#include <stdexcept>
#include <string>

namespace ultraheat {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error
{
public:
    using Error::Error;
};

class DimensionMismatch : public Error
{
public:
    using Error::Error;
};

/// Lattice size exceeds the configured cell cap.
class TooLarge : public Error
{
public:
    using Error::Error;
};

/// Field is on the wrong side (position vs frequency) for the operation.
class SideMismatch : public Error
{
public:
    using Error::Error;
};

class NotHomogeneous : public Error
{
public:
    using Error::Error;
};

class NotElliptic : public Error
{
public:
    using Error::Error;
};

/// A valuation could not be certified with the available digit budget.
class PrecisionOverflow : public Error
{
public:
    using Error::Error;
};

/// Shell masses requested from an atomic measure.
class UseAtoms : public Error
{
public:
    using Error::Error;
};

class NotPredictable : public Error
{
public:
    using Error::Error;
};

class NotAdditive : public Error
{
public:
    using Error::Error;
};

class Divergence : public Error
{
public:
    using Error::Error;
};

/// Configuration error; `path()` names the offending JSON field.
class ConfigError : public Error
{
public:
    ConfigError(std::string path, const std::string& what)
        : Error(path.empty() ? what : path + ": " + what), path_(std::move(path))
    {
    }

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

} // namespace ultraheat
