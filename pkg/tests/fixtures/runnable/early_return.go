// guarded division helper with an early return
func safeDiv(a, b) {
    if b == 0 {
        return 0
    }
    return a / b
}

// pick the larger of two numbers
func maxOf(a, b) {
    if a > b {
        return a
    }
    return b
}

q := safeDiv(input[0], input[1])
m := maxOf(q, input[2])
print(q, m)
