// build the fibonacci ladder up to the requested rung
//nolint:staticcheck
func ladder(rungs) {
    steps := make([]int, rungs)
    steps[0] = 1
    steps[1] = 1
    // each rung is the sum of the two rungs below it
    for r := 2; r < rungs; r += 1 {
        steps[r] = steps[r-1] + steps[r-2]
    }
    return steps
}

rungs := ladder(10)
// report the top of the ladder only
print(rungs[9])
