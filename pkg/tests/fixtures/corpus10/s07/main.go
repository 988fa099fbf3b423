// summarise the latency samples with spread statistics
//nolint:mnd
samples := []int{12, 7, 25, 3, 18, 9}
lowest := samples[0]
widest := samples[0]
for k := 0; k < 6; k += 1 {
    if samples[k] < lowest {
        lowest = samples[k]
    }
    if samples[k] > widest {
        widest = samples[k]
    }
}
// the spread is the gap between the extremes
spread := widest - lowest
print(lowest, widest, spread)
