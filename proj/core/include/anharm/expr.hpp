#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace anharm {

namespace detail {
struct ExprNode;
}

/// Real-valued arithmetic expression over a position x and a frequency xi.
///
/// Grammar: numeric literals, `x[i]`, `xi[i]` (bare `x` and `xi` mean index
/// 0), `pi`, the binary operators `+ - * / ^` (`^` is right associative and
/// binds tighter than unary minus), and the functions `exp`, `log`, `sqrt`,
/// `abs` and `br`, where `br(u) = (1 + u^2)^(1/2)`.
class Expression {
 public:
  /// Throws ParseError with the byte offset of the first bad token.
  static Expression parse(std::string_view text);

  /// Indices past the end of a span evaluate to 0.
  double operator()(std::span<const double> x, std::span<const double> xi) const;

  const std::string& text() const noexcept { return text_; }

  /// Largest index referenced through x[.] or xi[.]; -1 if none.
  int max_index() const noexcept { return max_index_; }

  bool uses_x() const noexcept { return uses_x_; }
  bool uses_xi() const noexcept { return uses_xi_; }

 private:
  Expression() = default;

  std::string text_;
  std::shared_ptr<const detail::ExprNode> root_;
  int max_index_ = -1;
  bool uses_x_ = false;
  bool uses_xi_ = false;
};

}  // namespace anharm
