#include "sbest/method_id.hpp"

#include <algorithm>
#include <cctype>

namespace sbest {

namespace {

bool is_identifier_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '<' ||
           c == '>' || c == '-' || static_cast<unsigned char>(c) >= 0x80;
}

bool valid_name(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), is_identifier_char);
}

bool valid_package(std::string_view s) {
    if (s.empty()) return true;  // default package
    if (s.front() == '.' || s.back() == '.') return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (c == '.') {
            if (s[i + 1] == '.') return false;
        } else if (!is_identifier_char(c) || c == '$') {
            return false;
        }
    }
    return true;
}

}  // namespace

MethodId::MethodId(std::string package, std::string klass, std::string method,
                   std::optional<std::string> signature)
    : package_(std::move(package)),
      class_(std::move(klass)),
      method_(std::move(method)),
      signature_(std::move(signature)) {
    canonical_.reserve(package_.size() + class_.size() + method_.size() + 8);
    canonical_ += package_;
    canonical_ += '$';
    canonical_ += class_;
    canonical_ += '#';
    canonical_ += method_;
    if (signature_) {
        canonical_ += '(';
        canonical_ += *signature_;
        canonical_ += ')';
    }
}

MethodId MethodId::parse(std::string_view text) {
    auto fail = [&](const char* why) {
        return Error("malformed method id '" + std::string(text) + "': " + why);
    };
    const auto dollar = text.find('$');
    if (dollar == std::string_view::npos) throw fail("missing '$' between package and class");
    const auto hash = text.find('#', dollar);
    if (hash == std::string_view::npos) throw fail("missing '#' before method name");

    std::string_view package = text.substr(0, dollar);
    std::string_view klass = text.substr(dollar + 1, hash - dollar - 1);
    std::string_view rest = text.substr(hash + 1);

    std::optional<std::string> signature;
    std::string_view method = rest;
    if (const auto paren = rest.find('('); paren != std::string_view::npos) {
        if (rest.back() != ')') throw fail("unterminated parameter list");
        method = rest.substr(0, paren);
        std::string_view params = rest.substr(paren + 1, rest.size() - paren - 2);
        if (params.find_first_of("()") != std::string_view::npos)
            throw fail("nested parentheses in parameter list");
        signature = std::string(params);
    }
    if (!valid_package(package)) throw fail("invalid package");
    if (!valid_name(klass)) throw fail("invalid class name");
    if (!valid_name(method)) throw fail("invalid method name");
    return MethodId(std::string(package), std::string(klass), std::string(method),
                    std::move(signature));
}

MethodId MethodId::from_frame(std::string_view class_fqn, std::string_view method) {
    const auto dot = class_fqn.rfind('.');
    if (dot == std::string_view::npos)
        return MethodId("", std::string(class_fqn), std::string(method));
    return MethodId(std::string(class_fqn.substr(0, dot)), std::string(class_fqn.substr(dot + 1)),
                    std::string(method));
}

std::string MethodId::class_fqn() const {
    return package_.empty() ? class_ : package_ + '.' + class_;
}

MethodId MethodId::coarse() const { return MethodId(package_, class_, method_); }

bool same_method(const MethodId& a, const MethodId& b) noexcept {
    if (a.has_signature() && b.has_signature()) return a == b;
    return a.package() == b.package() && a.class_name() == b.class_name() &&
           a.method() == b.method();
}

bool coarse_only_match(const MethodId& a, const MethodId& b) noexcept {
    return a.has_signature() != b.has_signature() && same_method(a, b);
}

}  // namespace sbest
