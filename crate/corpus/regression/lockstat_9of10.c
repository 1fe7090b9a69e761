/* counter is written under dev_lock in nine places out of ten */
int counter;

void update_1(void)
{
	mutex_lock(&dev_lock);
	counter = 1;
	mutex_unlock(&dev_lock);
}

void update_2(void)
{
	mutex_lock(&dev_lock);
	counter = 2;
	mutex_unlock(&dev_lock);
}

void update_3(void)
{
	mutex_lock(&dev_lock);
	counter = 3;
	mutex_unlock(&dev_lock);
}

void update_4(void)
{
	mutex_lock(&dev_lock);
	counter = 4;
	mutex_unlock(&dev_lock);
}

void update_5(void)
{
	mutex_lock(&dev_lock);
	counter = 5;
	mutex_unlock(&dev_lock);
}

void update_6(void)
{
	mutex_lock(&dev_lock);
	counter = 6;
	mutex_unlock(&dev_lock);
}

void update_7(void)
{
	mutex_lock(&dev_lock);
	counter = 7;
	mutex_unlock(&dev_lock);
}

void update_8(void)
{
	mutex_lock(&dev_lock);
	counter = 8;
	mutex_unlock(&dev_lock);
}

void update_9(void)
{
	mutex_lock(&dev_lock);
	counter = 9;
	mutex_unlock(&dev_lock);
}

void update_10(void)
{
	counter = 10;
}
