#pragma once

namespace remora {

// Library functions written in Remora itself (dynamic dialect). Loaded into
// every session unless --no-prelude is given.
inline const char* preludeSource() {
    return R"PRELUDE(
;;; Remora prelude

(define (vmag [v 1])
  (square-root (reduce/zero + 0 (square v))))

(define (mean [xs 1])
  (/ (reduce + xs) (length xs)))

(define (variance [xs 1])
  (mean (square (- xs (mean xs)))))

(define (covariance [xs 1] [ys 1])
  (mean (* (- xs (mean xs))
           (- ys (mean ys)))))

(define (dot-product [v 1] [w 1])
  (reduce/zero + 0 (* v w)))

(define (poly-eval [coeffs 1] [x 0])
  (reduce/zero + 0
               (* coeffs
                  (expt x (iota [(length coeffs)])))))

(define (fact [n 0])
  (reduce/zero * 1 (+ 1 (iota [n]))))

(define (v*m [v 1] [m 2]) (reduce/zero + 0 (* v m)))

(define (m*m [a 2] [b 2]) (v*m a b))

;; Lexicographic order on vectors: the reduction picks out the leftmost
;; non-zero element of v-w.
(define (lex< [v 1] [w 1])
  (negative? (reduce (fn (x y) (select (zero? x) y x))
                     (- v w))))

;; Keep a char if it's not a space, or its left neighbor isn't a space.
(define (collapse-spaces [s 1])
  (let* ((ns (not (char=? #\space s)))
         (lns (drop-right1 (append [#t] ns) 1)))
    (filter (or ns lns) s)))

(define (vector-convolve [v 1] [w 1])
  (reduce + (* (rotate v (indices-of w))
               w)))
)PRELUDE";
}

} // namespace remora
