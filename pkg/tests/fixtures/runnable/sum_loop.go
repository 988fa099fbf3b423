// accumulate the running sum of the sample values
sum := 0
s := []int{1, 2, 3, 4, 5, 6}
for i := 0; i < 6; i += 1 {
    sum += s[i]
}
print(sum)
