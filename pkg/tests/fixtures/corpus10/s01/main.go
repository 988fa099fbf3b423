// accumulate the running sum across all sample readings
// then track the largest reading seen so far
//nolint:gosec
//go:generate mockgen -source=main.go
readings := []int{4, 11, 2, 9, 5, 16, 8, 3}
sum := 0
highest := 0
for i := 0; i < 8; i += 1 {
    // add the current reading into the running sum
    sum += readings[i]
    if readings[i] > highest {
        highest = readings[i]
    }
}
// emit the aggregate figures for the caller
print(sum, highest)
