#ifndef SBEST_METHOD_ID_HPP
#define SBEST_METHOD_ID_HPP

#include <compare>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sbest {

/// Base class for all errors raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonical identity of a Java method.
///
/// The canonical text form follows the spectra identifier grammar without
/// the trailing line number:
///
///     <package>$<Class>#<method>[(<params>)]
///
/// Nested classes keep their `$` separators inside the class part
/// (`org.x$Outer$Inner#m()`). An absent signature and an empty parameter
/// list are different things: `C#m` carries no signature, `C#m()` carries
/// the empty one.
class MethodId {
public:
    MethodId() = default;
    MethodId(std::string package, std::string klass, std::string method,
             std::optional<std::string> signature = std::nullopt);

    /// Parses the canonical form. Throws sbest::Error on malformed text.
    static MethodId parse(std::string_view text);

    /// Builds an identity from a stack-frame class name (`org.x.C$Inner`)
    /// and method name. Frames never carry signatures.
    static MethodId from_frame(std::string_view class_fqn, std::string_view method);

    const std::string& package() const noexcept { return package_; }
    const std::string& class_name() const noexcept { return class_; }
    const std::string& method() const noexcept { return method_; }
    const std::optional<std::string>& signature() const noexcept { return signature_; }
    bool has_signature() const noexcept { return signature_.has_value(); }

    /// Dot-separated fully-qualified class name, `org.x.C$Inner`.
    std::string class_fqn() const;

    const std::string& str() const noexcept { return canonical_; }

    /// The same method with its signature dropped.
    MethodId coarse() const;

    friend bool operator==(const MethodId& a, const MethodId& b) noexcept {
        return a.canonical_ == b.canonical_;
    }
    friend std::strong_ordering operator<=>(const MethodId& a, const MethodId& b) noexcept {
        return a.canonical_.compare(b.canonical_) <=> 0;
    }

private:
    std::string package_;
    std::string class_;
    std::string method_;
    std::optional<std::string> signature_;
    std::string canonical_;
};

/// Identity test used to join spectra, traces, call graphs and ground truth.
/// When both sides carry a signature they must agree exactly; otherwise the
/// comparison falls back to package, class and method name.
bool same_method(const MethodId& a, const MethodId& b) noexcept;

/// True when the two ids only match through the signature-less fallback.
bool coarse_only_match(const MethodId& a, const MethodId& b) noexcept;

}  // namespace sbest

template <>
struct std::hash<sbest::MethodId> {
    std::size_t operator()(const sbest::MethodId& m) const noexcept {
        return std::hash<std::string>{}(m.str());
    }
};

#endif  // SBEST_METHOD_ID_HPP
