// derive a few intermediate quantities from the input
base := input[0]
twice := base * 2
offset := twice + 7
scaled := offset * base
print(scaled)
leftover := scaled % 5
print(leftover)
