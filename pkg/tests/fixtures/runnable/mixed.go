// tally positive entries in the input sequence
//nolint:gocyclo
count := 0
total := 0
for i := 0; i < len(input); i += 1 {
    v := input[i]
    if v > 0 {
        count += 1
        total += v
    }
}
/* report the final count and total */
print(count, total)
