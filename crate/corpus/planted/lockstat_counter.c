/* planted: counter is written under counter_lock in 9 of 10 places; the last write is bare */

void set_1(struct ctl *c)
{
	mutex_lock(&counter_lock);
	counter = 1;
	mutex_unlock(&counter_lock);
}

void set_2(struct ctl *c)
{
	mutex_lock(&counter_lock);
	counter = 2;
	mutex_unlock(&counter_lock);
}

void set_3(struct ctl *c)
{
	mutex_lock(&counter_lock);
	counter = 3;
	mutex_unlock(&counter_lock);
}

void set_4(struct ctl *c)
{
	mutex_lock(&counter_lock);
	counter = 4;
	mutex_unlock(&counter_lock);
}

void set_5(struct ctl *c)
{
	mutex_lock(&counter_lock);
	counter = 5;
	mutex_unlock(&counter_lock);
}

void set_6(struct ctl *c)
{
	mutex_lock(&counter_lock);
	counter = 6;
	mutex_unlock(&counter_lock);
}

void set_7(struct ctl *c)
{
	mutex_lock(&counter_lock);
	counter = 7;
	mutex_unlock(&counter_lock);
}

void set_8(struct ctl *c)
{
	mutex_lock(&counter_lock);
	counter = 8;
	mutex_unlock(&counter_lock);
}

void set_9(struct ctl *c)
{
	mutex_lock(&counter_lock);
	counter = 9;
	mutex_unlock(&counter_lock);
}

void set_10(struct ctl *c)
{
	counter = 10;
}
